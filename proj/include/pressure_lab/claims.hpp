#pragma once

// Reproduction recipes, one per checked result; shared by the CLI
// `reproduce` command and the acceptance binary.

#include <functional>
#include <string>
#include <vector>

namespace pressure_lab::claims {

struct ClaimResult {
    std::string id;
    bool passed = true;
    std::vector<std::string> details;  // expected vs computed lines
    double seconds = 0.0;
    double runtime_limit = 0.0;

    bool within_time() const { return seconds < runtime_limit; }
    bool ok() const { return passed && within_time(); }
};

class Recorder {
public:
    /// |computed - expected| <= tolerance
    void near(const std::string& what, double expected, double computed, double tolerance);
    /// computed <= bound + tolerance
    void at_most(const std::string& what, double bound, double computed, double tolerance = 0.0);
    void holds(const std::string& what, bool condition, const std::string& detail = {});
    void note(const std::string& line);

    bool passed() const noexcept { return passed_; }
    std::vector<std::string> take_lines() { return std::move(lines_); }

private:
    bool passed_ = true;
    std::vector<std::string> lines_;
};

struct Claim {
    std::string id;
    std::string title;
    double runtime_limit = 1.0;  // seconds
    std::function<void(Recorder&, unsigned threads)> run;
};

const std::vector<Claim>& all_claims();
/// Throws UnknownClaim.
const Claim& find_claim(const std::string& id);
ClaimResult run_claim(const Claim& claim, unsigned threads = 0);

}  // namespace pressure_lab::claims
