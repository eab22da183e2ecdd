#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/experiment.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        auto cfg = cgl::parse_config(args);
        if (!cfg) return 0; // help printed
        cgl::RunReport rep = cgl::run_experiment(*cfg);
        for (const auto& v : rep.verdicts)
            std::printf("%-4s %-18s observed %-12.6g band [%g, %g]%s%s\n",
                        v.pass ? "pass" : "FAIL", v.name.c_str(), v.observed,
                        v.lo, v.hi, v.note.empty() ? "" : "  ",
                        v.note.c_str());
        std::printf("%s: rows %s, report %s (%.1fs)\n",
                    rep.all_pass ? "all verdicts pass" : "verdicts failed",
                    rep.rows_path.c_str(), rep.report_path.c_str(),
                    rep.wall_seconds);
        return cgl::report_exit_code(rep);
    } catch (const cgl::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
