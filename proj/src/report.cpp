#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "modcont/experiment.hpp"

namespace modcont {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os.precision(17);
  return os;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void write_verdict_rows(std::ostream& os, const std::string& experiment, const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    os << csv_field(experiment) << ',' << v.criterion << ',' << csv_field(v.name) << ',' << v.value << ','
       << csv_field(v.relation) << ',' << v.threshold << ',' << (v.pass ? "pass" : "fail") << ','
       << csv_field(v.detail) << '\n';
}

constexpr const char* kVerdictHeader = "experiment,criterion,name,value,relation,threshold,pass,detail\n";

nlohmann::json number(double v) {
  // JSON has no infinities or NaN.
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["kind"] = to_string(r.kind);
  j["passed"] = r.passed();
  j["runtime_seconds"] = r.runtime_seconds;
  if (!r.error.empty()) j["error"] = r.error;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back({{"criterion", v.criterion}, {"name", v.name}, {"value", number(v.value)},
                             {"relation", v.relation}, {"threshold", v.threshold}, {"pass", v.pass},
                             {"detail", v.detail}});
  j["scalars"] = nlohmann::json::object();
  for (const auto& [k, v] : r.scalars) j["scalars"][k] = number(v);
  j["provenance"] = r.provenance;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : r.tables) j["tables"].push_back({{"name", t.name}, {"columns", t.columns}});
  return j.dump(2);
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& t : r.tables) {
    auto os = open_out(fs::path(dir) / (t.name + ".csv"));
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
      os << '\n';
    }
  }
  auto vs = open_out(fs::path(dir) / "verdicts.csv");
  vs << kVerdictHeader;
  write_verdict_rows(vs, r.name, r.verdicts);
  open_out(fs::path(dir) / "report.json") << report_json(r) << '\n';
}

void write_suite(const SuiteReport& suite, const std::string& dir) {
  fs::create_directories(dir);
  auto vs = open_out(fs::path(dir) / "verdicts.csv");
  vs << kVerdictHeader;
  for (const auto& r : suite.experiments) {
    write_report(r, (fs::path(dir) / r.name).string());
    write_verdict_rows(vs, r.name, r.verdicts);
    if (!r.error.empty())
      write_verdict_rows(vs, r.name, {{criterion_of(r.kind), "run error", 0.0, "", 0.0, false, r.error}});
  }
}

}  // namespace modcont
