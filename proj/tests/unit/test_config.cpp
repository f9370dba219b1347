#include <doctest.h>

#include <map>

#include "ironylab/config.hpp"
#include "ironylab/error.hpp"
#include "test_support.hpp"

using namespace ironylab;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("full config") {
    const char* text = R"(
[experiment]
strategy = "ps+"
threshold = 0.65
parallelism = 2
limit = 50
seed = 9
stratified = false
out = "results"

[model]
provider = "openai"
name = "gpt-4o-mini"
max_tokens = 200
temperature = 0.0
openai_api_key = "${MY_KEY}"

[cache]
dir = "cache"

[retry]
max_retries = 5
base_backoff_ms = 250
jitter = 0.1

[embedding]
mode = "gateway"
provider = "openai"
model = "text-embedding-3-large"

[similarity]
moderate = 0.5
almost_identical = 0.9

[[dataset]]
name = "isarcasm"
path = "data/isarcasm.csv"
text_column = "tweet"
label_column = "sarcastic"
intended_column = "rephrase"

[[dataset]]
name = "reddit"
path = "/abs/reddit.jsonl"
format = "jsonl"
ironic_values = ["1"]
non_ironic_values = ["-1"]
strict = true
)";
    const auto c = parse_config(text, "/base", fake_env({{"MY_KEY", "sk-1"}}));
    CHECK(c.strategy == Method::PsPlus);
    CHECK(c.threshold == doctest::Approx(0.65));
    CHECK(c.parallelism == 2);
    CHECK(c.limit == 50u);
    CHECK(c.seed == 9);
    CHECK_FALSE(c.stratified);
    CHECK(c.out_dir == std::filesystem::path("/base/results"));
    CHECK(c.model.provider == ProviderKind::OpenAICompat);
    CHECK(c.model.model == "gpt-4o-mini");
    CHECK(c.model.max_tokens == 200);
    CHECK(c.model.temperature == 0.0);
    CHECK(c.credentials.openai_key == "sk-1");
    CHECK(c.cache_dir == std::filesystem::path("/base/cache"));
    CHECK(c.retry.max_retries == 5);
    CHECK(c.retry.base_backoff == std::chrono::milliseconds(250));
    CHECK(c.embedding.use_gateway);
    CHECK(c.embedding.model == "text-embedding-3-large");
    CHECK(c.bounds.moderate == doctest::Approx(0.5));
    REQUIRE(c.datasets.size() == 2);
    CHECK(c.datasets[0].path == std::filesystem::path("/base/data/isarcasm.csv"));
    CHECK(c.datasets[0].format == CorpusFormat::Csv);
    CHECK(c.datasets[0].intended_column == "rephrase");
    CHECK(c.datasets[1].path == std::filesystem::path("/abs/reddit.jsonl"));
    CHECK(c.datasets[1].format == CorpusFormat::Jsonl);
    CHECK(c.datasets[1].strict);
    CHECK(c.datasets[1].non_ironic_values == std::vector<std::string>{"-1"});
  }

  TEST_CASE("defaults") {
    const auto c = parse_config("", "/b", fake_env({}));
    CHECK(c.strategy == Method::Idadp);
    CHECK(c.threshold == doctest::Approx(0.7));
    CHECK(c.model.provider == ProviderKind::Mock);
    CHECK(c.model.max_tokens == 300);
    CHECK(c.model.temperature == doctest::Approx(0.3));
    CHECK(c.seed == 42);
    CHECK(c.knowledge == KnowledgeMode::Frozen);
    CHECK(c.out_dir == std::filesystem::path("/b/out"));
    CHECK_FALSE(c.embedding.use_gateway);
  }

  TEST_CASE("keys fall back to the environment") {
    const auto c = parse_config("[model]\nprovider = \"gemini\"\n", "/b",
                                fake_env({{"GEMINI_API_KEY", "g"}, {"OPENAI_BASE_URL", "http://local:8000"}}));
    CHECK(c.credentials.gemini_key == "g");
    CHECK(c.credentials.openai_base_url == "http://local:8000");
  }

  TEST_CASE("interpolation") {
    const auto env = fake_env({{"A", "x"}, {"B", "y"}});
    CHECK(interpolate_env("${A}-${B}-${C}", env) == "x-y-");
    CHECK(interpolate_env("plain", env) == "plain");
    CHECK(interpolate_env("$A", env) == "$A");
  }

  TEST_CASE("invalid configs") {
    const auto env = fake_env({});
    CHECK(code_of([&] { parse_config("not = [toml", "/b", env); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { parse_config("[experiment]\nstrategy = \"tot\"\n", "/b", env); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { parse_config("[model]\nprovider = \"nobody\"\n", "/b", env); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { parse_config("[[dataset]]\npath = \"x.csv\"\n", "/b", env); }) == ErrorCode::InvalidConfig);
    auto c = parse_config("", "/b", env);
    c.threshold = 1.0;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
    c = parse_config("", "/b", env);
    c.parallelism = 0;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
    c = parse_config("", "/b", env);
    c.bounds = {0.9, 0.8};
    CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("dataset selection") {
    auto c = parse_config("[[dataset]]\nname = \"a\"\npath = \"a.csv\"\n[[dataset]]\nname = \"b\"\npath = \"b.csv\"\n",
                          "/b", fake_env({}));
    select_dataset(c, "b");
    REQUIRE(c.datasets.size() == 1);
    CHECK(c.datasets[0].name == "b");
    CHECK(code_of([&] { select_dataset(c, "zzz"); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("e2e fixture config loads") {
    const auto c = load_config(testing::data_dir() / "e2e" / "experiment.toml", fake_env({}));
    REQUIRE(c.datasets.size() == 1);
    CHECK(c.mock_script == testing::data_dir() / "e2e" / "mock_script.json");
    CHECK(c.retry.base_backoff == std::chrono::milliseconds(1));
  }
}
