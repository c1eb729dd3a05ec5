// Acceptance harness: one line per criterion, nonzero exit on any failure.
// Run a single criterion with --only C<n>.

#include <cstdio>
#include <cstring>
#include <string>

#include "levywave/acceptance.hpp"

int main(int argc, char** argv) {
    levywave::AcceptanceOptions opt;
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> std::string {
            return i + 1 < argc ? std::string(argv[++i]) : std::string();
        };
        if (arg == "--threads") opt.threads = std::stoi(next());
        else if (arg == "--seed") opt.seed = std::stoull(next());
        else if (arg == "--budget")
            opt.budget = next() == "quick" ? levywave::CheckBudget::Quick
                                           : levywave::CheckBudget::Full;
        else if (arg == "--only") only = next();
        else {
            std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
            return 2;
        }
    }

    const auto results = levywave::run_acceptance(opt, only);
    if (results.empty()) {
        std::fprintf(stderr, "no criterion named %s\n", only.c_str());
        return 2;
    }
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.description.c_str());
        std::printf("       %s\n", r.details.c_str());
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
