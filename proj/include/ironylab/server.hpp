#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ironylab {

struct ServeOptions {
  std::filesystem::path log;
  std::optional<std::filesystem::path> annotations;  // default: <log>.annotations.jsonl
  std::optional<std::filesystem::path> static_dir;   // UI bundle served at /
  std::vector<std::string> annotators;               // round-robin assignment order
  bool reveal_gold = false;
};

// HTTP API over a result log and a separate annotation store:
//   GET  /api/items?offset&limit&annotator
//   GET  /api/items/{id}
//   POST /api/items/{id}/score
//   GET  /api/export (also /api/export.jsonl)
//   GET  /api/summary
// The result log is only ever read.
class AnnotationServer {
 public:
  explicit AnnotationServer(ServeOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ironylab
