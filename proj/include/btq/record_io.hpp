#ifndef BTQ_RECORD_IO_HPP
#define BTQ_RECORD_IO_HPP

#include <json.hpp>

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "btq/asymptotics.hpp"

namespace btq {

// ExperimentRecord wire schema: an array of
//   {"experiment": str, "params": {str: str}, "p": int, "value": number}
// with rows in input order. Values round-trip at full precision.

inline std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  std::string out = "[";
  char buf[40];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExperimentRecord& r = records[i];
    if (i) out += ",";
    out += "\n  {\"experiment\": \"" + r.experiment + "\", \"params\": {";
    bool first = true;
    for (const auto& [k, v] : r.params) {
      if (!first) out += ", ";
      first = false;
      out += "\"" + k + "\": \"" + v + "\"";
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out += "}, \"p\": " + std::to_string(r.p) + ", \"value\": " + buf + "}";
  }
  out += records.empty() ? "]" : "\n]";
  out += "\n";
  return out;
}

inline std::vector<ExperimentRecord> records_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad record JSON: ") + e.what());
  }
  if (!j.is_array()) throw std::invalid_argument("record JSON must be an array");
  std::vector<ExperimentRecord> out;
  for (const auto& item : j) {
    ExperimentRecord r;
    if (!item.contains("p") || !item.contains("value"))
      throw std::invalid_argument("record is missing p or value");
    r.p = item.at("p").get<long>();
    if (r.p < 1) throw std::invalid_argument("record p must be >= 1");
    r.value = item.at("value").get<double>();
    if (!std::isfinite(r.value)) throw std::invalid_argument("record value must be finite");
    if (item.contains("experiment")) r.experiment = item.at("experiment").get<std::string>();
    if (item.contains("params"))
      for (auto it = item.at("params").begin(); it != item.at("params").end(); ++it)
        r.params[it.key()] = it.value().get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace btq

#endif
