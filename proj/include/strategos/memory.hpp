#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "strategos/common.hpp"

namespace strategos {

// A named set of strategy variables produced by one decision step, e.g.
// Tactic -> aggressive, PriorityUnit -> raptor. Variable order is preserved.
struct StrategyRecord {
  long long timestep = 0;
  std::vector<std::pair<std::string, std::string>> variables;

  std::optional<std::string> get(std::string_view name) const {
    for (const auto& [k, v] : variables)
      if (k == name) return v;
    return std::nullopt;
  }

  void set(std::string name, std::string value) {
    for (auto& [k, v] : variables)
      if (k == name) {
        v = std::move(value);
        return;
      }
    variables.emplace_back(std::move(name), std::move(value));
  }

  bool operator==(const StrategyRecord&) const = default;
};

// The strategic memory M: an append-only sequence of StrategyRecords with
// strictly increasing timesteps. Update is append + latest-read; history is
// never rewritten, so full strategy traces stay auditable.
class MemoryDB {
 public:
  MemoryDB() = default;
  explicit MemoryDB(std::string persistence_path)
      : persistence_path_(std::move(persistence_path)) {}

  // Appends `record` stamped with timestep `t`. Rejects non-increasing
  // timesteps: that signals an orchestrator sequencing bug, not model noise.
  void add_memory(StrategyRecord record, long long t) {
    if (!records_.empty() && t <= records_.back().timestep)
      throw MemoryError("non-increasing memory timestep " + std::to_string(t) +
                        " (latest is " + std::to_string(records_.back().timestep) + ")");
    record.timestep = t;
    records_.push_back(std::move(record));
  }

  // Latest record, or nullptr when empty.
  const StrategyRecord* get_latest() const {
    return records_.empty() ? nullptr : &records_.back();
  }

  const std::vector<StrategyRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const std::optional<std::string>& persistence_path() const { return persistence_path_; }

  // JSON Lines: {"t": <int>, "vars": {name: value, ...}} per record,
  // variable order preserved.
  std::string serialize() const {
    std::string out;
    for (const auto& r : records_) {
      nlohmann::ordered_json j;
      j["t"] = r.timestep;
      nlohmann::ordered_json vars = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r.variables) vars[k] = v;
      j["vars"] = std::move(vars);
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  void persist(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw MemoryError("cannot open memory file for writing: " + path);
    f << serialize();
  }

  void persist() const {
    if (!persistence_path_) throw MemoryError("memory db has no persistence path");
    persist(*persistence_path_);
  }

  static MemoryDB deserialize(std::string_view text) {
    MemoryDB db;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::ordered_json j;  // ordered parse keeps variable order intact
      try {
        j = nlohmann::ordered_json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw MemoryError("malformed memory record at line " + std::to_string(line_no) + ": " +
                          e.what());
      }
      if (!j.is_object() || !j.contains("t") || !j["t"].is_number_integer() ||
          !j.contains("vars") || !j["vars"].is_object())
        throw MemoryError("malformed memory record at line " + std::to_string(line_no));
      StrategyRecord r;
      r.timestep = j["t"].get<long long>();
      for (const auto& [k, v] : j["vars"].items()) {
        if (!v.is_string())
          throw MemoryError("malformed memory record at line " + std::to_string(line_no) +
                            ": variable values must be strings");
        r.variables.emplace_back(k, v.get<std::string>());
      }
      if (!db.records_.empty() && r.timestep <= db.records_.back().timestep)
        throw MemoryError("memory integrity error: non-monotone timestep at line " +
                          std::to_string(line_no));
      db.records_.push_back(std::move(r));
    }
    return db;
  }

  static MemoryDB load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MemoryError("cannot open memory file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    MemoryDB db = deserialize(text);
    db.persistence_path_ = path;
    return db;
  }

 private:
  std::vector<StrategyRecord> records_;
  std::optional<std::string> persistence_path_;
};

inline void add_memory(MemoryDB& db, StrategyRecord record, long long t) {
  db.add_memory(std::move(record), t);
}

inline const StrategyRecord* get_latest(const MemoryDB& db) { return db.get_latest(); }

}  // namespace strategos
