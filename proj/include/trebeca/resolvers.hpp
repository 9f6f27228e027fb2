#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trebeca/interpreter.hpp"

namespace trebeca {

/// Seeded pseudo-random decisions. mt19937_64 output is fully specified by
/// the standard, and the reduction is a plain modulo, so a seed gives the
/// same decisions on every platform.
class SeededResolver : public ChoiceResolver {
 public:
  explicit SeededResolver(std::uint64_t seed) : rng_(seed) {}
  std::uint32_t choose(const ChoiceSite&, std::uint32_t arity) override {
    return static_cast<std::uint32_t>(rng_() % arity);
  }

 private:
  std::mt19937_64 rng_;
};

/// Always the first alternative.
class FirstResolver : public ChoiceResolver {
 public:
  std::uint32_t choose(const ChoiceSite&, std::uint32_t) override { return 0; }
};

/// Replays a fixed decision sequence, then answers 0 and records the arity of
/// every decision it was asked for. Used to enumerate decision vectors.
class ScriptedResolver : public ChoiceResolver {
 public:
  explicit ScriptedResolver(std::vector<std::uint32_t> script = {}) : script_(std::move(script)) {}

  std::uint32_t choose(const ChoiceSite&, std::uint32_t arity) override {
    std::uint32_t pick = 0;
    if (taken_.size() < script_.size()) {
      pick = script_[taken_.size()];
      if (pick >= arity) {
        throw std::out_of_range("scripted decision out of range");
      }
    }
    taken_.push_back(pick);
    arities_.push_back(arity);
    return pick;
  }

  const std::vector<std::uint32_t>& taken() const { return taken_; }
  const std::vector<std::uint32_t>& arities() const { return arities_; }
  bool consumed_script() const { return taken_.size() >= script_.size(); }

  /// Next decision vector in odometer order after `taken`, or false when
  /// every vector has been produced.
  bool advance();

 private:
  std::vector<std::uint32_t> script_;
  std::vector<std::uint32_t> taken_;
  std::vector<std::uint32_t> arities_;
};

/// Forwards to another resolver and records what it answered.
class RecordingResolver : public ChoiceResolver {
 public:
  explicit RecordingResolver(ChoiceResolver& inner) : inner_(inner) {}
  std::uint32_t choose(const ChoiceSite& site, std::uint32_t arity) override {
    auto pick = inner_.choose(site, arity);
    taken_.push_back(pick);
    return pick;
  }
  std::vector<std::uint32_t> take() { return std::exchange(taken_, {}); }

 private:
  ChoiceResolver& inner_;
  std::vector<std::uint32_t> taken_;
};

}  // namespace trebeca
