#pragma once

#include <string>
#include <utility>
#include <vector>

namespace depmig::testkit {

struct DocMemberSpec {
    std::string name; // simple class name for constructors
    bool constructor = false;
    std::vector<std::pair<std::string, std::string>> params; // qualified type, parameter name
    std::string return_type = "void";
    std::string description;
    std::vector<std::string> param_docs; // parallel to params
    std::string returns;
    std::string since;
};

struct DocClassSpec {
    std::string package;
    std::string name;
    std::string description;
    std::vector<DocMemberSpec> members;
};

enum class DocletStyle { jdk7, jdk8 };

/// Class page shaped like the standard doclet output of the given JDK.
std::string javadoc_page(const DocClassSpec& spec, DocletStyle style = DocletStyle::jdk7);

} // namespace depmig::testkit
