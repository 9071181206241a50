#pragma once
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace volterra {

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v);

// Shared result type for hypothesis checks and analyses. Constants are
// nonnegative and finite by construction; signed or unbounded quantities go
// to diagnostics.
struct Report {
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, double> constants;
    std::map<std::string, double> diagnostics;
    std::map<std::string, std::complex<double>> witnesses;
    std::vector<std::string> notes;

    void set_constant(const std::string& name, double value);
    double constant(const std::string& name) const;
    bool passed() const { return verdict == Verdict::pass; }
};

using HypothesisReport = Report;
using AnalysisReport = Report;

// all of them must pass; any fail fails; otherwise inconclusive
Verdict combine(const std::vector<Verdict>& parts);

}  // namespace volterra
