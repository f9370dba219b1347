#include "ironylab/embedding.hpp"

#include <cmath>

#include "ironylab/kernels.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

Embedding HashingEmbedder::embed(std::string_view input) {
  // Code points of the lowercased text with whitespace runs collapsed and
  // one space of padding on each side.
  std::vector<std::string> cps{" "};
  std::size_t pos = 0;
  const std::string lower = text::to_lower_ascii(input);
  while (pos < lower.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::next_code_point(lower, pos);
    if (text::is_unicode_space(cp)) {
      if (cps.back() != " ") cps.emplace_back(" ");
    } else {
      cps.emplace_back(lower.substr(start, pos - start));
    }
  }
  if (cps.back() != " ") cps.emplace_back(" ");

  Embedding v(kDimension, 0.0);
  for (std::size_t n = 2; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram = std::to_string(n) + ":";
      for (std::size_t k = 0; k < n; ++k) gram += cps[i + k];
      v[text::fnv1a64(gram) % kDimension] += 1.0;
    }
  }
  const double ss = kernels::sum_squares(v.data(), v.size());
  if (ss > 0.0) kernels::scale(v.data(), v.size(), 1.0 / std::sqrt(ss));
  return v;
}

GatewayEmbedder::GatewayEmbedder(Gateway& gateway, ProviderKind provider, std::string model)
    : gateway_(gateway), provider_(provider), model_(std::move(model)) {}

Embedding GatewayEmbedder::embed(std::string_view text) {
  try {
    return gateway_.embed(provider_, model_, std::string(text));
  } catch (const Error& e) {
    throw Error(ErrorCode::EmbedderUnavailable, std::string(to_string(provider_)) + "/" + model_ + ": " + e.what());
  }
}

std::string GatewayEmbedder::name() const { return std::string(to_string(provider_)) + ":" + model_; }

Embedding embed(std::string_view text, Embedder& provider) {
  if (text::trim(text).empty()) throw Error(ErrorCode::EmptyInput, "cannot embed empty text");
  return provider.embed(text);
}

}  // namespace ironylab
