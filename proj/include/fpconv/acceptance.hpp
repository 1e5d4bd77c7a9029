#ifndef FPCONV_ACCEPTANCE_HPP
#define FPCONV_ACCEPTANCE_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fpconv::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the ten self-test criteria, printing one pass/fail line per
// criterion to 'log'. Tolerances can be overridden by name ("c1".."c10").
// 'profile_dir' receives the CSV output of the profile criterion.
std::vector<CriterionResult> run_all(std::ostream& log,
                                     const std::map<std::string, double>& tol_overrides = {},
                                     const std::string& profile_dir = "acceptance_profiles");

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace fpconv::acceptance

#endif
