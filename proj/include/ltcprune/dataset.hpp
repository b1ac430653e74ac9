#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ltcprune/errors.hpp"
#include "ltcprune/numeric.hpp"

namespace ltcprune {

enum class ChannelKind { physical, noise, interaction, target };

inline const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::physical: return "physical";
    case ChannelKind::noise: return "noise";
    case ChannelKind::interaction: return "interaction";
    case ChannelKind::target: return "target";
  }
  return "physical";
}

inline ChannelKind channel_kind_from_string(const std::string& s) {
  if (s == "physical") return ChannelKind::physical;
  if (s == "noise") return ChannelKind::noise;
  if (s == "interaction") return ChannelKind::interaction;
  if (s == "target") return ChannelKind::target;
  throw data_error("unknown channel kind '" + s + "'");
}

struct ChannelMeta {
  std::string name;
  double mu = 0.0;     // sample mean removed by standardization
  double sigma = 1.0;  // sample std divided out (n-1 convention)
  ChannelKind kind = ChannelKind::physical;
};

struct Channel {
  ChannelMeta meta;
  std::vector<double> values;
};

enum class Segment { train, val, test };

inline const char* to_string(Segment s) {
  switch (s) {
    case Segment::train: return "train";
    case Segment::val: return "val";
    case Segment::test: return "test";
  }
  return "train";
}

inline Segment segment_from_string(const std::string& s) {
  if (s == "train") return Segment::train;
  if (s == "val") return Segment::val;
  if (s == "test") return Segment::test;
  throw config_error("unknown segment '" + s + "' (expected train|val|test)");
}

// Standardized multichannel series on a uniform grid with a chronological
// train/val/test split: train [0, train_end), val [train_end, val_end),
// test [val_end, n).
struct TimeSeriesDataset {
  std::vector<double> t;
  std::vector<Channel> channels;
  Channel target;
  std::size_t train_end = 0;
  std::size_t val_end = 0;

  std::size_t size() const { return t.size(); }
  std::size_t input_dim() const { return channels.size(); }

  std::vector<std::string> channel_names() const {
    std::vector<std::string> names;
    names.reserve(channels.size());
    for (const auto& c : channels) names.push_back(c.meta.name);
    return names;
  }

  const Channel* find(const std::string& name) const {
    for (const auto& c : channels)
      if (c.meta.name == name) return &c;
    return nullptr;
  }
};

struct SegmentRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

inline SegmentRange segment_range(const TimeSeriesDataset& ds, Segment s) {
  switch (s) {
    case Segment::train: return {0, ds.train_end};
    case Segment::val: return {ds.train_end, ds.val_end};
    case Segment::test: return {ds.val_end, ds.size()};
  }
  return {0, 0};
}

// Row-major dense matrix; rows are time steps, cols are channels.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
};

// Throws if the dataset violates its structural contract.
inline void validate(const TimeSeriesDataset& ds) {
  const std::size_t n = ds.size();
  if (n < 2) throw data_error("dataset: need at least 2 samples");
  std::set<std::string> names;
  for (const auto& c : ds.channels) {
    if (c.values.size() != n)
      throw data_error("dataset: channel '" + c.meta.name + "' length mismatch");
    if (!names.insert(c.meta.name).second)
      throw data_error("dataset: duplicate channel name '" + c.meta.name + "'");
    const double mu = mean(c.values);
    const double sd = sample_std(c.values);
    if (std::abs(mu) >= 1e-9 || std::abs(sd - 1.0) >= 1e-6)
      throw data_error("dataset: channel '" + c.meta.name + "' is not standardized");
    if (!(c.meta.sigma > 0.0))
      throw data_error("dataset: channel '" + c.meta.name + "' has sigma <= 0");
  }
  if (ds.target.values.size() != n) throw data_error("dataset: target length mismatch");
  if (names.count(ds.target.meta.name))
    throw data_error("dataset: target name collides with a channel");
  if (!(ds.train_end > 0 && ds.train_end < ds.val_end && ds.val_end < n))
    throw data_error("dataset: split indices out of order");
}

// Sets split indices so the train segment takes the first part of the
// series, validation the most recent part of the training block, and test
// the tail. Defaults (0.8, 0.2) give 64/16/20.
inline TimeSeriesDataset chrono_split(TimeSeriesDataset ds, double train_frac,
                                      double val_frac_of_train,
                                      std::size_t warmup = 50) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw config_error("chrono_split: train_frac must be in (0, 1)");
  if (!(val_frac_of_train > 0.0 && val_frac_of_train < 1.0))
    throw config_error("chrono_split: val_frac_of_train must be in (0, 1)");
  const std::size_t n = ds.size();
  const auto train_full =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_frac));
  const auto val_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(train_full) * val_frac_of_train));
  if (val_len == 0 || val_len >= train_full)
    throw data_error("chrono_split: degenerate validation segment");
  ds.train_end = train_full - val_len;
  ds.val_end = train_full;
  const std::size_t test_len = n - ds.val_end;
  const std::size_t min_len = warmup + 1;
  if (ds.train_end < min_len || val_len < min_len || test_len < min_len)
    throw data_error("chrono_split: a segment is shorter than warm-up + 1 (" +
                     std::to_string(min_len) + " samples)");
  return ds;
}

// Indices of `wanted` names inside `universe`, in wanted order.
inline std::vector<std::size_t> lookup_indices(
    const std::vector<std::string>& universe,
    const std::vector<std::string>& wanted) {
  if (wanted.empty()) throw mismatch_error("channel selection is empty");
  std::vector<std::size_t> idx;
  idx.reserve(wanted.size());
  for (const auto& name : wanted) {
    auto it = std::find(universe.begin(), universe.end(), name);
    if (it == universe.end())
      throw mismatch_error("channel '" + name + "' not found");
    idx.push_back(static_cast<std::size_t>(it - universe.begin()));
  }
  return idx;
}

// Input matrix for the named channels over a sample range.
inline Matrix gather_inputs(const TimeSeriesDataset& ds,
                            const std::vector<std::string>& names,
                            SegmentRange range) {
  const auto idx = lookup_indices(ds.channel_names(), names);
  Matrix m(range.length(), idx.size());
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      m.at(r, c) = ds.channels[idx[c]].values[range.begin + r];
  return m;
}

inline std::vector<double> gather_target(const TimeSeriesDataset& ds,
                                         SegmentRange range) {
  return {ds.target.values.begin() + static_cast<std::ptrdiff_t>(range.begin),
          ds.target.values.begin() + static_cast<std::ptrdiff_t>(range.end)};
}

}  // namespace ltcprune
