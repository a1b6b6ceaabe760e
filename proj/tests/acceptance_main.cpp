// Acceptance suite: one line per criterion, nonzero exit if any gating
// criterion fails. Also reachable as `rsle acceptance-suite`.

#include <cstdlib>
#include <iostream>

#include "rsle/harness.hpp"

int main(int argc, char** argv) {
    unsigned workers = 0;
    if (argc > 1) workers = static_cast<unsigned>(std::atoi(argv[1]));
    const auto results = rsle::run_acceptance_suite(workers, std::cout);
    bool all = true;
    for (const auto& r : results)
        if (r.gating && !r.pass) all = false;
    std::cout << (all ? "ACCEPTANCE: all gating criteria passed"
                      : "ACCEPTANCE: FAILURES present")
              << std::endl;
    return all ? 0 : 1;
}
