#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ironylab/gateway.hpp"

namespace ironylab {

using Embedding = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view text) = 0;
  virtual std::string name() const = 0;
};

// Offline fallback: character trigram counts (code points, lowercased ASCII,
// space padded) hashed into 256 buckets with FNV-1a, then L2-normalized.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDimension = 256;

  Embedding embed(std::string_view text) override;
  std::string name() const override { return "hashing-trigram-256"; }
};

// Calls an embeddings endpoint through the gateway (cached by text hash).
class GatewayEmbedder final : public Embedder {
 public:
  GatewayEmbedder(Gateway& gateway, ProviderKind provider, std::string model);

  Embedding embed(std::string_view text) override;
  std::string name() const override;

 private:
  Gateway& gateway_;
  ProviderKind provider_;
  std::string model_;
};

// Rejects empty text, then delegates.
Embedding embed(std::string_view text, Embedder& provider);

}  // namespace ironylab
