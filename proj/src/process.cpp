#include "depmig/process.hpp"

#include "depmig/error.hpp"

#include <boost/asio/io_context.hpp>
#include <boost/process.hpp>

#include <future>

namespace bp = boost::process;

namespace depmig {

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options) {
    if (argv.empty()) {
        throw Error("run_process: empty argv");
    }
    // Names with a slash are paths, as in a shell.
    const auto exe = argv.front().find('/') != std::string::npos ? boost::filesystem::path(argv.front())
                                                                 : bp::search_path(argv.front());
    if (exe.empty()) {
        throw Error("executable not found on PATH: " + argv.front());
    }
    const std::vector<std::string> args(argv.begin() + 1, argv.end());

    auto env = boost::this_process::environment();
    for (const auto& [key, value] : options.env) {
        env[key] = value;
    }
    const auto cwd = options.cwd.empty() ? std::filesystem::current_path() : options.cwd;

    boost::asio::io_context io;
    std::future<std::string> out;
    std::future<std::string> err;
    ProcessResult result;
    try {
        bp::child child(exe, args, bp::std_in < boost::asio::buffer(options.input), bp::std_out > out,
                        bp::std_err > err, env, bp::start_dir(cwd.string()), io);
        io.run();
        child.wait();
        result.exit_code = child.exit_code();
    } catch (const bp::process_error& e) {
        throw Error("failed to run " + argv.front() + ": " + e.what());
    }
    result.out = out.get();
    result.err = err.get();
    return result;
}

} // namespace depmig
