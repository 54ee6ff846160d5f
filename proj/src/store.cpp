#include "stss/store.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace stss {

ResultStore::ResultStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // fresh store
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path_ + ":" + std::to_string(lineno) +
                               ": corrupt record line: " + e.what());
    }
    AccuracyRecord rec;
    rec.dataset_id = j.at("dataset").get<std::string>();
    rec.size = j.at("size").get<long>();
    rec.fold = j.at("fold").get<int>();
    rec.rep = j.at("rep").get<int>();
    rec.winning_method = parse_method(j.at("method").get<std::string>());
    rec.accuracy = j.at("accuracy").get<double>();
    if (index_.insert({rec.size, rec.fold, rec.rep}).second) {
      records_.push_back(std::move(rec));
    }
  }
}

bool ResultStore::contains(long size, int fold, int rep) const {
  return index_.count({size, fold, rep}) > 0;
}

bool ResultStore::append(const AccuracyRecord& record) {
  if (!index_.insert({record.size, record.fold, record.rep}).second) return false;

  nlohmann::ordered_json j;
  j["dataset"] = record.dataset_id;
  j["size"] = record.size;
  j["fold"] = record.fold;
  j["rep"] = record.rep;
  j["method"] = method_name(record.winning_method);
  j["accuracy"] = record.accuracy;

  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to store: " + path_);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed on store: " + path_);

  records_.push_back(record);
  return true;
}

}  // namespace stss
