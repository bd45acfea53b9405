#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "rica/robustica.hpp"
#include "rica/signal.hpp"
#include "rica/types.hpp"

namespace rica {

/// A block in either regime, as loaded from a file.
using AnyBlock = std::variant<SignalBlock<double>, SignalBlock<cplx>>;

enum class BlockFormat { csv, binary };

/// CSV: one row per channel; complex entries written as "re+imj" text.
void write_block_csv(std::ostream& out, const SignalBlock<double>& block);
void write_block_csv(std::ostream& out, const SignalBlock<cplx>& block);
AnyBlock read_block_csv(std::istream& in);

/// Binary: 16-byte header (magic, regime tag, L, T as little-endian 32-bit
/// unsigned) followed by row-major 64-bit floats, re/im interleaved in the
/// complex regime.
void write_block_binary(std::ostream& out, const SignalBlock<double>& block);
void write_block_binary(std::ostream& out, const SignalBlock<cplx>& block);
AnyBlock read_block_binary(std::istream& in);

void write_block_file(const std::string& path, const AnyBlock& block, BlockFormat format);
/// Sniffs the format from the magic bytes; anything else parses as CSV.
AnyBlock read_block_file(const std::string& path);

/// One complex scalar in the CSV text form (used by tests and tooling).
std::string format_scalar(double v);
std::string format_scalar(cplx v);
cplx parse_scalar(const std::string& token, int line_no);

/// Line-oriented report log (human-readable) and per-iteration CSV with a
/// running flop counter.
template <RegimeScalar S>
void write_report_log(std::ostream& out, const ExtractionReport<S>& rep, Index source_index);
template <RegimeScalar S>
void write_report_csv(std::ostream& out, const ExtractionReport<S>& rep, Index source_index,
                      bool header);

}  // namespace rica
