#ifndef PLCAUTO_CORE_TRACE_HPP
#define PLCAUTO_CORE_TRACE_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace plcauto {

/// Collapses runs of adjacent equal sensor vectors, keeping the first
/// observation of each run. Idempotent; never lengthens its input.
std::vector<Observation> dedup_consecutive(std::span<const Observation> trace);

/// Samples of a trace as indexed observations.
std::vector<Observation> to_observations(const LabeledTrace& trace);
std::vector<Observation> to_observations(std::span<const Sample> samples,
                                         std::size_t first_index = 0);

/// Splits a labeled trace into cycles delimited by onsets of maximal runs of
/// label A. Cycle j spans [onset_j, onset_{j+1}); samples after the last
/// onset are discarded as an incomplete cycle. Returns an empty vector when
/// fewer than two onsets exist. Throws ErrorKind::data if any sample is
/// unlabeled.
std::vector<Cycle> segment_cycles(const LabeledTrace& trace);

/// First floor(train_fraction * N) cycles go to train, the rest to test;
/// order is preserved. Throws ErrorKind::data when N < 2 or either side
/// would be empty, ErrorKind::usage when train_fraction is outside (0, 1).
std::pair<std::vector<Cycle>, std::vector<Cycle>> split_train_test(
    std::span<const Cycle> cycles, double train_fraction);

/// Trace CSV: header `# sampling_period_ms=<int>`, then one row per sample
/// `s0,s1,...,s10,label` with label one of A,B,C,D,T or `?` for unlabeled.
LabeledTrace read_trace_file(const std::string& path);
void write_trace_file(const LabeledTrace& trace, const std::string& path);

LabeledTrace parse_trace_csv(const std::string& text);
std::string format_trace_csv(const LabeledTrace& trace);

}  // namespace plcauto

#endif
