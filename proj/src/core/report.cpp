#include <fstream>

#include <json.hpp>

#include "lam/data.hpp"

namespace lam {

using nlohmann::json;

namespace {

json score_to_json(const ConfigScore& s) {
  return {{"total", s.total},
          {"evaluated", s.evaluated},
          {"correct", s.correct},
          {"determined", s.determined},
          {"defaulted", s.defaulted},
          {"skipped", s.skipped},
          {"determined_correct", s.determined_correct},
          {"accuracy", s.accuracy}};
}

ConfigScore score_from_json(const json& j) {
  ConfigScore s;
  s.total = j.at("total").get<std::size_t>();
  s.evaluated = j.at("evaluated").get<std::size_t>();
  s.correct = j.at("correct").get<std::size_t>();
  s.determined = j.at("determined").get<std::size_t>();
  s.defaulted = j.at("defaulted").get<std::size_t>();
  s.skipped = j.at("skipped").get<std::size_t>();
  s.determined_correct = j.at("determined_correct").get<std::size_t>();
  s.accuracy = j.at("accuracy").get<double>();
  return s;
}

}  // namespace

std::string report_to_string(const EvalReport& r) {
  json per_config = json::object();
  for (const auto& [name, score] : r.per_config) per_config[name] = score_to_json(score);
  json manual = json::object();
  for (const auto& [name, v] : r.manual) manual[name] = v ? json(*v) : json(nullptr);
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back({{"id", rec.id}, {"status", rec.status}, {"values", rec.values}});
  json j{{"schema_version", r.schema_version},
         {"task", r.task},
         {"mode", r.mode},
         {"label_space", r.label_space},
         {"total", r.total},
         {"skipped", r.skipped},
         {"per_config", per_config},
         {"full_accuracy", r.full_accuracy ? json(*r.full_accuracy) : json(nullptr)},
         {"metrics", r.metrics.empty() ? json::object() : json(r.metrics)},
         {"manual", manual},
         {"provenance", r.provenance.empty() ? json::object() : json(r.provenance)},
         {"records", records}};
  return j.dump(2) + "\n";
}

EvalReport report_from_string(std::string_view text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
      throw Error(ErrorCode::Data,
                  "unsupported report schema_version " + std::to_string(r.schema_version));
    r.task = j.at("task").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.label_space = j.at("label_space").get<int>();
    r.total = j.at("total").get<std::size_t>();
    r.skipped = j.at("skipped").get<std::size_t>();
    for (const auto& [name, score] : j.at("per_config").items())
      r.per_config[name] = score_from_json(score);
    if (!j.at("full_accuracy").is_null()) r.full_accuracy = j.at("full_accuracy").get<double>();
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    for (const auto& [name, v] : j.at("manual").items())
      r.manual[name] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    r.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    for (const auto& rec : j.at("records")) {
      r.records.push_back({rec.at("id").get<std::string>(), rec.at("status").get<std::string>(),
                           rec.at("values").get<std::map<std::string, std::string>>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Data, std::string("malformed report: ") + e.what());
  }
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_file(path, report_to_string(report));
}

EvalReport read_report(const std::filesystem::path& path) {
  return report_from_string(read_file(path));
}

}  // namespace lam
