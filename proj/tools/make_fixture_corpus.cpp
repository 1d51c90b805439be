// Builds the scripted fixture repositories, archive repository and oracle.

#include "fixture_corpus.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Builds the fixture corpus"};
    std::string out = "fixture-corpus";
    app.add_option("--out", out, "Output directory");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto corpus = depmig::testkit::build_corpus(std::filesystem::absolute(out));
        std::ofstream(corpus.root / "oracle.json") << depmig::testkit::oracle_json(corpus);
        std::cout << "projects: " << corpus.projects_file.string() << "\n"
                  << "repository: " << corpus.repository.string() << "\n"
                  << "oracle: " << (corpus.root / "oracle.json").string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
