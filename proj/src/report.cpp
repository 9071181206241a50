#include "volterra/report.hpp"

#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

void Report::set_constant(const std::string& name, double value) {
    if (!std::isfinite(value) || value < 0.0)
        throw DomainError("constant '" + name + "' must be nonnegative and finite, got " + std::to_string(value));
    constants[name] = value;
}

double Report::constant(const std::string& name) const {
    auto it = constants.find(name);
    if (it == constants.end()) throw DomainError("no constant named '" + name + "'");
    return it->second;
}

Verdict combine(const std::vector<Verdict>& parts) {
    bool all_pass = true;
    for (auto v : parts) {
        if (v == Verdict::fail) return Verdict::fail;
        if (v != Verdict::pass) all_pass = false;
    }
    return all_pass ? Verdict::pass : Verdict::inconclusive;
}

}  // namespace volterra
