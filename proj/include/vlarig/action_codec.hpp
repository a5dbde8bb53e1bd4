#pragma once

// Continuous action <-> token codec. Each action dimension is discretized
// independently into `bins_per_dim` uniform bins spanning the empirical
// 1st..99th percentile of the training actions (nearest-rank estimator),
// and bins map onto the last `bins_per_dim` token ids of an LLM-style
// vocabulary, ascending: bin 0 -> vocab_size - reserved.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vlarig/common.hpp"

namespace vlarig {

inline constexpr int kCodecFormatVersion = 1;

struct ActionSpec {
  int n_dims = 7;
  int bins_per_dim = 256;

  void validate() const {
    if (n_dims < 1) throw ValidationError("ActionSpec: n_dims must be >= 1");
    if (bins_per_dim < 2)
      throw ValidationError("ActionSpec: bins_per_dim must be >= 2");
  }
};

struct DimQuantiles {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double width = 0.0;  // (q_hi - q_lo) / bins_per_dim
};

struct TokenMap {
  int vocab_size = 32000;
  int reserved = 256;  // == bins_per_dim

  int first_token() const { return vocab_size - reserved; }
  int last_token() const { return vocab_size - 1; }

  void validate() const {
    if (reserved < 1) throw ValidationError("TokenMap: reserved must be >= 1");
    if (vocab_size < reserved)
      throw ValidationError("TokenMap: vocab_size must be >= reserved");
  }
};

// Nearest-rank percentile: rank = ceil(p * n), 1-indexed into the sorted
// sample. p in (0, 1].
inline double nearest_rank_percentile(std::vector<double> sample, double p) {
  const std::size_t n = sample.size();
  if (n == 0) throw FitError("percentile of empty sample");
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = sample.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(sample.begin(), nth, sample.end());
  return *nth;
}

class ActionCodec {
 public:
  ActionCodec() = default;
  ActionCodec(ActionSpec spec, std::vector<DimQuantiles> per_dim, TokenMap map)
      : spec_(spec), per_dim_(std::move(per_dim)), token_map_(map) {
    spec_.validate();
    token_map_.validate();
    if (static_cast<int>(per_dim_.size()) != spec_.n_dims)
      throw ValidationError("ActionCodec: per_dim length != n_dims");
  }

  const ActionSpec& spec() const { return spec_; }
  const TokenMap& token_map() const { return token_map_; }
  const std::vector<DimQuantiles>& per_dim() const { return per_dim_; }

  std::vector<int> tokenize(const std::vector<double>& action) const {
    if (static_cast<int>(action.size()) != spec_.n_dims)
      throw ValidationError("tokenize: action has " +
                            std::to_string(action.size()) + " dims, codec has " +
                            std::to_string(spec_.n_dims));
    std::vector<int> tokens(action.size());
    for (int d = 0; d < spec_.n_dims; ++d) {
      if (!std::isfinite(action[d]))
        throw ValidationError("tokenize: non-finite value in dimension " +
                              std::to_string(d));
      tokens[d] = bin_to_token(value_to_bin(d, action[d]));
    }
    return tokens;
  }

  std::vector<double> detokenize(const std::vector<int>& tokens) const {
    if (static_cast<int>(tokens.size()) != spec_.n_dims)
      throw DecodeError("detokenize: token vector has " +
                        std::to_string(tokens.size()) + " dims, codec has " +
                        std::to_string(spec_.n_dims));
    std::vector<double> action(tokens.size());
    for (int d = 0; d < spec_.n_dims; ++d) {
      action[d] = bin_to_value(d, token_to_bin(tokens[d], d));
    }
    return action;
  }

  int value_to_bin(int dim, double value) const {
    const DimQuantiles& q = per_dim_.at(dim);
    if (q.width <= 0.0) return middle_bin();
    const double raw = std::floor((value - q.q_lo) / q.width);
    const double hi = static_cast<double>(spec_.bins_per_dim - 1);
    return static_cast<int>(std::clamp(raw, 0.0, hi));
  }

  // Bin centers; degenerate dimensions decode to q_lo.
  double bin_to_value(int dim, int bin) const {
    const DimQuantiles& q = per_dim_.at(dim);
    if (q.width <= 0.0) return q.q_lo;
    return q.q_lo + (static_cast<double>(bin) + 0.5) * q.width;
  }

  int bin_to_token(int bin) const { return token_map_.first_token() + bin; }

  int token_to_bin(int token, int dim_for_error = -1) const {
    if (token < token_map_.first_token() || token > token_map_.last_token()) {
      throw DecodeError("token " + std::to_string(token) +
                        " outside action range [" +
                        std::to_string(token_map_.first_token()) + ", " +
                        std::to_string(token_map_.last_token()) + "]" +
                        (dim_for_error >= 0
                             ? " in dimension " + std::to_string(dim_for_error)
                             : ""));
    }
    return token - token_map_.first_token();
  }

  int middle_bin() const { return (spec_.bins_per_dim - 1) / 2; }

  json to_json() const {
    json per_dim = json::array();
    for (const auto& q : per_dim_) {
      per_dim.push_back({{"q_lo", q.q_lo}, {"q_hi", q.q_hi}, {"width", q.width}});
    }
    return json{{"format_version", kCodecFormatVersion},
                {"bin_orientation", "ascending"},
                {"spec", {{"n_dims", spec_.n_dims}, {"bins_per_dim", spec_.bins_per_dim}}},
                {"token_map", {{"vocab_size", token_map_.vocab_size}, {"reserved", token_map_.reserved}}},
                {"per_dim", per_dim}};
  }

  static ActionCodec from_json(const json& j) {
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kCodecFormatVersion) {
      throw DecodeError("codec file has unknown format_version (expected " +
                        std::to_string(kCodecFormatVersion) + ")");
    }
    ActionSpec spec;
    spec.n_dims = j.at("spec").at("n_dims").get<int>();
    spec.bins_per_dim = j.at("spec").at("bins_per_dim").get<int>();
    TokenMap map;
    map.vocab_size = j.at("token_map").at("vocab_size").get<int>();
    map.reserved = j.at("token_map").at("reserved").get<int>();
    std::vector<DimQuantiles> per_dim;
    for (const auto& q : j.at("per_dim")) {
      per_dim.push_back({q.at("q_lo").get<double>(), q.at("q_hi").get<double>(),
                         q.at("width").get<double>()});
    }
    return ActionCodec(spec, std::move(per_dim), map);
  }

  void save(const std::string& path) const { write_text_file(path, to_json().dump(2) + "\n"); }
  static ActionCodec load(const std::string& path) { return from_json(load_json_file(path)); }

 private:
  ActionSpec spec_;
  std::vector<DimQuantiles> per_dim_;
  TokenMap token_map_;
};

// Fits per-dimension 1st/99th percentile bounds. `samples[d]` holds every
// observed value of action dimension d.
inline ActionCodec fit_codec(const std::vector<std::vector<double>>& samples,
                             ActionSpec spec = {}, TokenMap token_map = {}) {
  spec.validate();
  token_map.reserved = spec.bins_per_dim;
  token_map.validate();
  if (static_cast<int>(samples.size()) != spec.n_dims)
    throw FitError("fit_codec: got " + std::to_string(samples.size()) +
                   " sample dimensions, spec wants " + std::to_string(spec.n_dims));

  std::vector<DimQuantiles> per_dim(spec.n_dims);
  for (int d = 0; d < spec.n_dims; ++d) {
    const auto& col = samples[d];
    if (col.size() < 2)
      throw FitError("fit_codec: dimension " + std::to_string(d) +
                     " has fewer than 2 samples");
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (!std::isfinite(col[i]))
        throw ValidationError("fit_codec: non-finite sample in dimension " +
                              std::to_string(d) + " at index " + std::to_string(i));
    }
    DimQuantiles q;
    q.q_lo = nearest_rank_percentile(col, 0.01);
    q.q_hi = nearest_rank_percentile(col, 0.99);
    q.width = (q.q_hi - q.q_lo) / static_cast<double>(spec.bins_per_dim);
    per_dim[d] = q;
  }
  return ActionCodec(spec, std::move(per_dim), token_map);
}

}  // namespace vlarig
