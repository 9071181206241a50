#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "volterra/kernels.hpp"
#include "volterra/report.hpp"
#include "volterra/simulate.hpp"
#include "volterra/system.hpp"

namespace volterra::cli {

using json = nlohmann::json;

inline constexpr int schema_version = 1;
inline constexpr const char* tool_version = "1.0.0";

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;  // empty: current directory (selfcheck: no files)
    int threads = -1;
    std::optional<double> tol;
};

struct TaskResult {
    json report;
    std::vector<std::pair<std::string, std::string>> files;  // extra artifacts (name, contents)
    Verdict verdict = Verdict::pass;
};

json read_config(const std::string& path);

cplx parse_complex(const json& j, const std::string& path);
Kernel parse_kernel(const json& j, const std::string& path);
DiagonalSystem parse_system(const json& config);
ScalarSignal parse_input(const json& j, const std::string& path);

TaskResult run_admissibility(const json& config, const GlobalOptions& g);
TaskResult run_controllability(const json& config, const GlobalOptions& g);
TaskResult run_simulate(const json& config, const GlobalOptions& g);
TaskResult run_carleson(const json& config, const GlobalOptions& g);
TaskResult run_resolvent(const json& config, const GlobalOptions& g);
TaskResult run_heat(const json& config, const GlobalOptions& g);

struct SelfcheckItem {
    std::string name;
    double value;
    double expected;
    double tol;
    bool pass;
};
std::vector<SelfcheckItem> selfcheck(std::optional<double> tol);

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);
std::string csv_field(const std::string& s);
std::string format_double(double v);
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// runs one task end to end: config, analysis, report.json, manifest.json, artifacts.
// analysis_overrides are merged into config["analysis"]. Returns the exit code.
int execute(const std::string& task, const GlobalOptions& g, const json& analysis_overrides, std::ostream& out,
            std::ostream& err);
int execute_selfcheck(const GlobalOptions& g, std::ostream& out, std::ostream& err);

}  // namespace volterra::cli
