#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ironylab/metrics.hpp"

namespace ironylab {

struct AnnotationRecord {
  std::string item_id;
  std::string annotator_id;
  std::vector<int> criteria;  // contextual, consistency, clarity
  std::optional<std::string> remarks;
  std::string timestamp;
  std::uint64_t version = 0;  // per (item, annotator), starting at 1
  std::optional<std::string> nonce;

  int score() const { return rubric_score({item_id, annotator_id, criteria}); }
};

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(const nlohmann::json& j);

enum class SubmitStatus { Created, Updated, Duplicate, Conflict };

struct SubmitResult {
  SubmitStatus status = SubmitStatus::Created;
  AnnotationRecord record;  // the stored record (current one on conflict)
};

// Append-only store; the latest record per (item, annotator) is current and
// every earlier version stays in the file.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::optional<std::filesystem::path> path = std::nullopt);

  // Throws MalformedAnnotation for bad criteria or a missing annotator id.
  // `expected_version` guards against overwriting a record the client has
  // not seen (0 means "no record yet"). A repeated nonce is a no-op.
  SubmitResult submit(const std::string& item_id, const std::string& annotator_id, std::vector<int> criteria,
                      std::optional<std::string> remarks, std::optional<std::uint64_t> expected_version = std::nullopt,
                      std::optional<std::string> nonce = std::nullopt);

  std::optional<AnnotationRecord> get(const std::string& item_id, const std::string& annotator_id) const;
  std::vector<AnnotationRecord> current() const;
  std::vector<AnnotationRecord> history() const;
  std::vector<RubricAnnotation> rubric() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<AnnotationRecord> history_;
  std::map<std::pair<std::string, std::string>, std::size_t> latest_;  // -> index into history_
};

// Current records from an annotation file (as written by AnnotationStore).
std::vector<RubricAnnotation> load_rubric(const std::filesystem::path& path);

}  // namespace ironylab
