#pragma once

#include <string>
#include <vector>

// Release-gate checks: closed-form anchors, randomized invariant scans,
// trend checks at growing system sizes, and simulator cross-validation.
// Each check prints its measured margins; the named suites group them for
// the command-line front end.

namespace jst {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // measured values and margins, one line
    double seconds = 0;
};

// Runs one of the twelve checks (1-based). threads caps the simulation
// worker count for the simulator-backed check; 0 picks a default.
CriterionResult run_criterion(int id, int threads = 0);

// Suite name -> criterion ids; throws std::invalid_argument on an unknown
// name. Names: prop1, thm1, thm2, thm3, bounds.
std::vector<int> suite_criteria(const std::string& suite);

std::vector<std::string> suite_names();

}  // namespace jst
