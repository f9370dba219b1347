#include "ironylab/annotation.hpp"

#include <fstream>
#include <sstream>

#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

json to_json(const AnnotationRecord& r) {
  json j = {{"item_id", r.item_id},
            {"annotator_id", r.annotator_id},
            {"criteria", r.criteria},
            {"contextual", r.criteria.at(0)},
            {"consistency", r.criteria.at(1)},
            {"clarity", r.criteria.at(2)},
            {"score", r.score()},
            {"remarks", r.remarks ? json(*r.remarks) : json(nullptr)},
            {"timestamp", r.timestamp},
            {"version", r.version}};
  if (r.nonce) j["nonce"] = *r.nonce;
  return j;
}

AnnotationRecord annotation_from_json(const json& j) {
  try {
    AnnotationRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.annotator_id = j.at("annotator_id").get<std::string>();
    r.criteria = j.at("criteria").get<std::vector<int>>();
    if (j.contains("remarks") && !j["remarks"].is_null()) r.remarks = j["remarks"].get<std::string>();
    r.timestamp = j.value("timestamp", std::string());
    r.version = j.value("version", std::uint64_t{0});
    if (j.contains("nonce") && j["nonce"].is_string()) r.nonce = j["nonce"].get<std::string>();
    rubric_score({r.item_id, r.annotator_id, r.criteria});
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedAnnotation, std::string("bad annotation record: ") + e.what());
  }
}

AnnotationStore::AnnotationStore(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (!path_ || !std::filesystem::exists(*path_)) return;
  std::istringstream in(text::read_file(*path_));
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn final line from a crash
    AnnotationRecord r = annotation_from_json(j);
    latest_[{r.item_id, r.annotator_id}] = history_.size();
    history_.push_back(std::move(r));
  }
}

SubmitResult AnnotationStore::submit(const std::string& item_id, const std::string& annotator_id,
                                     std::vector<int> criteria, std::optional<std::string> remarks,
                                     std::optional<std::uint64_t> expected_version, std::optional<std::string> nonce) {
  if (text::trim(annotator_id).empty()) throw Error(ErrorCode::MalformedAnnotation, "annotator_id is required");
  rubric_score({item_id, annotator_id, criteria});

  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(item_id, annotator_id);
  const auto it = latest_.find(key);
  const AnnotationRecord* prior = it == latest_.end() ? nullptr : &history_[it->second];
  if (prior && nonce && prior->nonce == nonce) return {SubmitStatus::Duplicate, *prior};
  const std::uint64_t current = prior ? prior->version : 0;
  if (expected_version && *expected_version != current) {
    SubmitResult conflict{SubmitStatus::Conflict, {}};
    if (prior) conflict.record = *prior;
    return conflict;
  }

  AnnotationRecord r;
  r.item_id = item_id;
  r.annotator_id = annotator_id;
  r.criteria = std::move(criteria);
  r.remarks = std::move(remarks);
  r.timestamp = text::utc_timestamp();
  r.version = current + 1;
  r.nonce = std::move(nonce);
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    const std::string line = to_json(r).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + path_->string());
  }
  latest_[key] = history_.size();
  history_.push_back(r);
  return {prior ? SubmitStatus::Updated : SubmitStatus::Created, std::move(r)};
}

std::optional<AnnotationRecord> AnnotationStore::get(const std::string& item_id, const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  const auto it = latest_.find({item_id, annotator_id});
  if (it == latest_.end()) return std::nullopt;
  return history_[it->second];
}

std::vector<AnnotationRecord> AnnotationStore::current() const {
  std::lock_guard lock(mutex_);
  std::vector<AnnotationRecord> out;
  out.reserve(latest_.size());
  for (const auto& [key, idx] : latest_) out.push_back(history_[idx]);
  return out;
}

std::vector<AnnotationRecord> AnnotationStore::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

std::vector<RubricAnnotation> AnnotationStore::rubric() const {
  std::vector<RubricAnnotation> out;
  for (const auto& r : current()) out.push_back({r.item_id, r.annotator_id, r.criteria});
  return out;
}

std::vector<RubricAnnotation> load_rubric(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "annotation file " + path.string() + " not found");
  return AnnotationStore(path).rubric();
}

}  // namespace ironylab
