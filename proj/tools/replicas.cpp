#include "replicas.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ironylab/text.hpp"

namespace ironylab::replicas {
namespace {

constexpr const char* kWords[] = {
    "the", "a", "really", "love", "when", "my", "train", "is", "late", "again", "great", "day", "for",
    "work", "coffee", "rain", "just", "what", "i", "needed", "people", "always", "never", "best", "week",
    "ever", "so", "happy", "about", "this", "weather", "phone", "battery", "dies", "at", "noon", "thanks",
    "boss", "meeting", "long", "short", "nice", "city", "bus", "stop", "dinner", "burnt", "perfect", "timing",
    "you", "they", "we", "said", "think", "argument", "evidence", "gun", "law", "policy", "vote", "because",
    "right", "wrong", "maybe", "point", "sure", "fact", "believe", "read", "post", "thread", "game", "team",
};
constexpr std::size_t kWordCount = sizeof(kWords) / sizeof(kWords[0]);

std::mt19937_64 rng_for(const std::string& name) { return std::mt19937_64(text::fnv1a64(name)); }

// Row lengths summing exactly to `total`, each at least 1, with some spread.
std::vector<std::size_t> lengths(std::size_t n, std::size_t total, std::mt19937_64& rng) {
  std::vector<std::size_t> out(n, total / n);
  for (std::size_t i = 0; i < total % n; ++i) out[i] += 1;
  std::shuffle(out.begin(), out.end(), rng);
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const std::size_t room = std::min(out[i + 1] - 1, out[i + 1] / 2);
    if (room == 0) continue;
    const std::size_t d = std::uniform_int_distribution<std::size_t>(0, room)(rng);
    out[i] += d;
    out[i + 1] -= d;
  }
  return out;
}

std::vector<bool> ironic_flags(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<bool> out(n, false);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), true);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::string words(std::size_t count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kWordCount - 1);
  std::string s;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += kWords[pick(rng)];
  }
  return s;
}

struct Rows {
  std::vector<std::size_t> len;
  std::vector<bool> ironic;
};

Rows layout(const ReplicaSpec& r) {
  auto rng = rng_for(r.name + "/layout");
  Rows rows;
  rows.len = lengths(r.size, total_tokens(r), rng);
  rows.ironic = ironic_flags(r.size, r.ironic, rng);
  return rows;
}

void write_isarcasm(const ReplicaSpec& r, std::ostream& out) {
  const Rows rows = layout(r);
  auto rng = rng_for(r.name + "/text");
  out << ",tweet,sarcastic,rephrase,sarcasm,irony,satire,understatement,overstatement,rhetorical_question\n";
  for (std::size_t i = 0; i < r.size; ++i) {
    const bool ir = rows.ironic[i];
    out << i << ',' << words(rows.len[i], rng) << ',' << (ir ? 1 : 0) << ',';
    if (ir) out << words(1 + rows.len[i] / 2, rng);
    int kind = ir ? static_cast<int>(i % 6) : -1;
    for (int k = 0; k < 6; ++k) out << ',' << (k == kind ? 1 : 0);
    out << '\n';
  }
}

void write_semeval(const ReplicaSpec& r, std::ostream& out) {
  const Rows rows = layout(r);
  auto rng = rng_for(r.name + "/text");
  out << "Tweet index\tLabel\tTweet text\n";
  for (std::size_t i = 0; i < r.size; ++i)
    out << (i + 1) << '\t' << (rows.ironic[i] ? 1 : 0) << '\t' << words(rows.len[i], rng) << '\n';
}

void write_iac(const ReplicaSpec& r, const std::string& corpus, std::ostream& out) {
  const Rows rows = layout(r);
  auto rng = rng_for(r.name + "/text");
  out << "Corpus,Label,ID,Quote Text,Response Text\n";
  std::size_t sarc = 0, notsarc = 0;
  for (std::size_t i = 0; i < r.size; ++i) {
    const bool ir = rows.ironic[i];
    const std::string label = ir ? "sarc" : "notsarc";
    const std::size_t id = ir ? ++sarc : ++notsarc;
    out << corpus << ',' << label << ',' << corpus << '_' << label << '_' << id << ',' << words(8, rng) << ','
        << words(rows.len[i], rng) << '\n';
  }
}

void write_reddit(const ReplicaSpec& r, std::ostream& out) {
  const Rows rows = layout(r);
  auto rng = rng_for(r.name + "/text");
  for (std::size_t i = 0; i < r.size; ++i) {
    nlohmann::json j{{"comment_text", words(rows.len[i], rng)}, {"label", rows.ironic[i] ? 1 : -1}};
    out << j.dump() << '\n';
  }
}

const char* kDatasetsToml = R"([[dataset]]
name = "isarcasm"
path = "isarcasm.csv"
format = "csv"
text_column = "tweet"
label_column = "sarcastic"
intended_column = "rephrase"

[[dataset]]
name = "semeval2018"
path = "semeval2018.tsv"
format = "tsv"
text_column = "Tweet text"
label_column = "Label"
id_column = "Tweet index"

[[dataset]]
name = "sarc-gen"
path = "sarc-gen.csv"
format = "csv"
text_column = "Response Text"
label_column = "Label"
id_column = "ID"
ironic_values = ["sarc"]
non_ironic_values = ["notsarc"]

[[dataset]]
name = "sarc-rq"
path = "sarc-rq.csv"
format = "csv"
text_column = "Response Text"
label_column = "Label"
id_column = "ID"
ironic_values = ["sarc"]
non_ironic_values = ["notsarc"]

[[dataset]]
name = "sarc-hyp"
path = "sarc-hyp.csv"
format = "csv"
text_column = "Response Text"
label_column = "Label"
id_column = "ID"
ironic_values = ["sarc"]
non_ironic_values = ["notsarc"]

[[dataset]]
name = "reddit-irony"
path = "reddit-irony.jsonl"
format = "jsonl"
text_column = "comment_text"
label_column = "label"
ironic_values = ["1"]
non_ironic_values = ["-1"]
)";

}  // namespace

const std::vector<ReplicaSpec>& catalog() {
  static const std::vector<ReplicaSpec> specs{
      {"isarcasm", "isarcasm.csv", CorpusFormat::Csv, 1600, 224, 16.4},
      {"semeval2018", "semeval2018.tsv", CorpusFormat::Tsv, 4792, 2396, 13.7},
      {"sarc-gen", "sarc-gen.csv", CorpusFormat::Csv, 6520, 3260, 43.3},
      {"sarc-rq", "sarc-rq.csv", CorpusFormat::Csv, 1702, 851, 54.2},
      {"sarc-hyp", "sarc-hyp.csv", CorpusFormat::Csv, 1164, 582, 65.3},
      {"reddit-irony", "reddit-irony.jsonl", CorpusFormat::Jsonl, 1949, 526, 41.35},
  };
  return specs;
}

std::size_t total_tokens(const ReplicaSpec& r) {
  return static_cast<std::size_t>(std::llround(r.mean_length * static_cast<double>(r.size)));
}

void write_all(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& r : catalog()) {
    std::ostringstream out;
    if (r.name == "isarcasm") write_isarcasm(r, out);
    else if (r.name == "semeval2018") write_semeval(r, out);
    else if (r.name == "sarc-gen") write_iac(r, "GEN", out);
    else if (r.name == "sarc-rq") write_iac(r, "RQ", out);
    else if (r.name == "sarc-hyp") write_iac(r, "HYP", out);
    else write_reddit(r, out);
    text::write_file_atomic(dir / r.file, out.str());
  }
  text::write_file_atomic(dir / "datasets.toml", kDatasetsToml);
}

}  // namespace ironylab::replicas
