#include "javadoc_html.hpp"

namespace depmig::testkit {
namespace {

std::string simple(const std::string& type) {
    const auto dot = type.rfind('.');
    return dot == std::string::npos ? type : type.substr(dot + 1);
}

std::string anchor(const DocMemberSpec& m, DocletStyle style) {
    std::string out = m.name;
    if (style == DocletStyle::jdk7) {
        out += '(';
        for (std::size_t i = 0; i < m.params.size(); ++i) {
            if (i) out += ", ";
            out += m.params[i].first;
        }
        return out + ')';
    }
    out += '-';
    for (const auto& [type, name] : m.params) {
        std::string t = type;
        for (auto pos = t.find("[]"); pos != std::string::npos; pos = t.find("[]")) t.replace(pos, 2, ":A");
        out += t + '-';
    }
    return out;
}

void member(std::string& out, const DocClassSpec& cls, const DocMemberSpec& m, DocletStyle style, bool last) {
    out += "<a name=\"" + anchor(m, style) + "\">\n<!--   -->\n</a>\n";
    out += last ? "<ul class=\"blockListLast\">\n" : "<ul class=\"blockList\">\n";
    out += "<li class=\"blockList\">\n<h4>" + m.name + "</h4>\n<pre>public&nbsp;";
    if (!m.constructor) out += simple(m.return_type) + "&nbsp;";
    out += m.name + "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) out += ",\n         ";
        out += "<a href=\"../../../" + cls.package + "/" + simple(m.params[i].first) + ".html\" title=\"class in " +
               cls.package + "\">" + simple(m.params[i].first) + "</a>&nbsp;" + m.params[i].second;
    }
    out += ")</pre>\n";
    out += "<div class=\"block\">" + m.description + "</div>\n";
    const bool has_tags = !m.params.empty() || !m.returns.empty() || !m.since.empty();
    if (has_tags) {
        out += "<dl>";
        if (!m.params.empty()) {
            out += "<dt><span class=\"strong\">Parameters:</span></dt>";
            for (std::size_t i = 0; i < m.params.size(); ++i) {
                const auto doc = i < m.param_docs.size() ? m.param_docs[i] : std::string();
                out += "<dd><code>" + m.params[i].second + "</code> - " + doc + "</dd>";
            }
        }
        if (!m.returns.empty()) out += "<dt><span class=\"strong\">Returns:</span></dt><dd>" + m.returns + "</dd>";
        if (!m.since.empty()) out += "<dt><span class=\"strong\">Since:</span></dt>\n  <dd>" + m.since + "</dd>";
        out += "</dl>\n";
    }
    out += "</li>\n</ul>\n";
}

} // namespace

std::string javadoc_page(const DocClassSpec& spec, DocletStyle style) {
    const std::string ctor_marker = style == DocletStyle::jdk7 ? "constructor_detail" : "constructor.detail";
    const std::string method_marker = style == DocletStyle::jdk7 ? "method_detail" : "method.detail";

    std::string out;
    out += "<!DOCTYPE HTML PUBLIC \"-//W3C//DTD HTML 4.01 Transitional//EN\" "
           "\"http://www.w3.org/TR/html4/loose.dtd\">\n<html lang=\"en\">\n<head>\n<title>" +
           spec.name + "</title>\n</head>\n<body>\n";
    out += "<!-- ======== START OF CLASS DATA ======== -->\n<div class=\"header\">\n<div class=\"subTitle\">" +
           spec.package + "</div>\n<h2 title=\"Class " + spec.name + "\" class=\"title\">Class " + spec.name +
           "</h2>\n</div>\n<div class=\"contentContainer\">\n";
    out += "<div class=\"description\">\n<ul class=\"blockList\">\n<li class=\"blockList\">\n<hr>\n<br>\n"
           "<pre>public final class <span class=\"strong\">" +
           spec.name + "</span>\nextends java.lang.Object</pre>\n<div class=\"block\">" + spec.description +
           "</div>\n</li>\n</ul>\n</div>\n";
    // The summary tables repeat member names and must not be mistaken for details.
    out += "<div class=\"summary\">\n<table class=\"overviewSummary\">\n";
    for (const auto& m : spec.members) {
        out += "<tr><td><code><strong><a href=\"#" + anchor(m, style) + "\">" + m.name +
               "</a></strong>()</code>\n<div class=\"block\">" + m.description + "</div></td></tr>\n";
    }
    out += "</table>\n</div>\n<div class=\"details\">\n<ul class=\"blockList\">\n<li class=\"blockList\">\n";

    std::vector<const DocMemberSpec*> ctors;
    std::vector<const DocMemberSpec*> methods;
    for (const auto& m : spec.members) (m.constructor ? ctors : methods).push_back(&m);
    if (!ctors.empty()) {
        out += "<!-- ========= CONSTRUCTOR DETAIL ======== -->\n<ul class=\"blockList\">\n<li class=\"blockList\">"
               "<a name=\"" + ctor_marker + "\">\n<!--   -->\n</a>\n<h3>Constructor Detail</h3>\n";
        for (std::size_t i = 0; i < ctors.size(); ++i) member(out, spec, *ctors[i], style, i + 1 == ctors.size());
        out += "</li>\n</ul>\n";
    }
    if (!methods.empty()) {
        out += "<!-- ============ METHOD DETAIL ========== -->\n<ul class=\"blockList\">\n<li class=\"blockList\">"
               "<a name=\"" + method_marker + "\">\n<!--   -->\n</a>\n<h3>Method Detail</h3>\n";
        for (std::size_t i = 0; i < methods.size(); ++i) member(out, spec, *methods[i], style, i + 1 == methods.size());
        out += "</li>\n</ul>\n";
    }
    out += "</li>\n</ul>\n</div>\n</div>\n<!-- ========= END OF CLASS DATA ========= -->\n</body>\n</html>\n";
    return out;
}

} // namespace depmig::testkit
