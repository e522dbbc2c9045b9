// Runs the full acceptance matrix, one line per criterion, and exits
// nonzero when any criterion fails.
#include <cstdlib>
#include <iostream>

#include "caloric/acceptance.hpp"

int main(int argc, char** argv) {
    int threads = 1;
    if (argc > 1 && std::atoi(argv[1]) > 1) threads = std::atoi(argv[1]);

    const auto results = caloric::run_acceptance(threads, &std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed)
        std::cout << failed << " of " << results.size() << " criteria failed\n";
    else
        std::cout << "all " << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
