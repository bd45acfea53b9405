#include "rica/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "rica/errors.hpp"

namespace rica {
namespace {

constexpr std::uint32_t kMagic = 0x41434952u;  // "RICA" little-endian
constexpr std::uint32_t kTagReal = 0u;
constexpr std::uint32_t kTagComplex = 1u;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("binary block: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  static_assert(sizeof(double) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw IoError("binary block: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_scalar(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_scalar(cplx v) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", v.real(), v.imag());
  return buf;
}

cplx parse_scalar(const std::string& raw, int line_no) {
  const std::string tok = trim(raw);
  if (tok.empty()) throw IoError("csv block: empty field on line " + std::to_string(line_no));
  const bool has_j = tok.back() == 'j' || tok.back() == 'J';
  const std::string body = has_j ? tok.substr(0, tok.size() - 1) : tok;
  // split at the sign of the imaginary part: the last +/- not preceded by an
  // exponent marker and not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  try {
    if (has_j) {
      if (split == std::string::npos) {
        // pure imaginary, e.g. "1j" or "-2.5j"
        return {0.0, std::stod(body)};
      }
      return {std::stod(body.substr(0, split)), std::stod(body.substr(split))};
    }
    return {std::stod(body), 0.0};
  } catch (const std::exception&) {
    throw IoError("csv block: cannot parse '" + tok + "' on line " + std::to_string(line_no));
  }
}

void write_block_csv(std::ostream& out, const SignalBlock<double>& block) {
  for (Index l = 0; l < block.channels(); ++l) {
    for (Index t = 0; t < block.samples(); ++t) {
      if (t) out << ',';
      out << format_scalar(block.data()(l, t));
    }
    out << '\n';
  }
}

void write_block_csv(std::ostream& out, const SignalBlock<cplx>& block) {
  for (Index l = 0; l < block.channels(); ++l) {
    for (Index t = 0; t < block.samples(); ++t) {
      if (t) out << ',';
      out << format_scalar(block.data()(l, t));
    }
    out << '\n';
  }
}

AnyBlock read_block_csv(std::istream& in) {
  std::vector<std::vector<cplx>> rows;
  bool complex_seen = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<cplx> row;
    for (const std::string& tok : split_csv_line(line)) {
      const std::string t = trim(tok);
      if (t.find('j') != std::string::npos || t.find('J') != std::string::npos) {
        complex_seen = true;
      }
      row.push_back(parse_scalar(t, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("csv block: ragged row on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("csv block: no data rows");

  const Index L = static_cast<Index>(rows.size());
  const Index T = static_cast<Index>(rows.front().size());
  if (complex_seen) {
    Matrix<cplx> m(L, T);
    for (Index l = 0; l < L; ++l) {
      for (Index t = 0; t < T; ++t) m(l, t) = rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
    }
    return SignalBlock<cplx>(std::move(m));
  }
  Matrix<double> m(L, T);
  for (Index l = 0; l < L; ++l) {
    for (Index t = 0; t < T; ++t) m(l, t) = rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)].real();
  }
  return SignalBlock<double>(std::move(m));
}

void write_block_binary(std::ostream& out, const SignalBlock<double>& block) {
  put_u32(out, kMagic);
  put_u32(out, kTagReal);
  put_u32(out, static_cast<std::uint32_t>(block.channels()));
  put_u32(out, static_cast<std::uint32_t>(block.samples()));
  for (Index l = 0; l < block.channels(); ++l) {
    for (Index t = 0; t < block.samples(); ++t) put_f64(out, block.data()(l, t));
  }
}

void write_block_binary(std::ostream& out, const SignalBlock<cplx>& block) {
  put_u32(out, kMagic);
  put_u32(out, kTagComplex);
  put_u32(out, static_cast<std::uint32_t>(block.channels()));
  put_u32(out, static_cast<std::uint32_t>(block.samples()));
  for (Index l = 0; l < block.channels(); ++l) {
    for (Index t = 0; t < block.samples(); ++t) {
      put_f64(out, block.data()(l, t).real());
      put_f64(out, block.data()(l, t).imag());
    }
  }
}

AnyBlock read_block_binary(std::istream& in) {
  if (get_u32(in) != kMagic) throw IoError("binary block: bad magic");
  const std::uint32_t tag = get_u32(in);
  const Index L = static_cast<Index>(get_u32(in));
  const Index T = static_cast<Index>(get_u32(in));
  if (L < 1 || T < 1) throw IoError("binary block: empty shape in header");
  if (tag == kTagReal) {
    Matrix<double> m(L, T);
    for (Index l = 0; l < L; ++l) {
      for (Index t = 0; t < T; ++t) m(l, t) = get_f64(in);
    }
    return SignalBlock<double>(std::move(m));
  }
  if (tag == kTagComplex) {
    Matrix<cplx> m(L, T);
    for (Index l = 0; l < L; ++l) {
      for (Index t = 0; t < T; ++t) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        m(l, t) = {re, im};
      }
    }
    return SignalBlock<cplx>(std::move(m));
  }
  throw IoError("binary block: unknown regime tag " + std::to_string(tag));
}

void write_block_file(const std::string& path, const AnyBlock& block, BlockFormat format) {
  std::ofstream out(path, format == BlockFormat::binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::visit(
      [&](const auto& b) {
        if (format == BlockFormat::binary) {
          write_block_binary(out, b);
        } else {
          write_block_csv(out, b);
        }
      },
      block);
  if (!out) throw IoError("write failed: " + path);
}

AnyBlock read_block_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char head[4] = {0, 0, 0, 0};
  in.read(head, 4);
  const bool is_binary = in.gcount() == 4 && head[0] == 'R' && head[1] == 'I' &&
                         head[2] == 'C' && head[3] == 'A';
  in.clear();
  in.seekg(0);
  return is_binary ? read_block_binary(in) : read_block_csv(in);
}

namespace {

template <RegimeScalar S>
void report_log_impl(std::ostream& out, const ExtractionReport<S>& rep, Index source_index) {
  out << "source " << source_index << ": " << rep.iterations << " iteration"
      << (rep.iterations == 1 ? "" : "s") << ", stop=" << to_string(rep.stop_reason)
      << ", flops=" << rep.flops;
  if (!rep.contrast_trajectory.empty()) {
    out << ", kurtosis=" << format_scalar(rep.contrast_trajectory.back());
  }
  if (rep.sign_mismatch) out << ", sign-mismatch";
  out << '\n';
  for (std::size_t i = 0; i < rep.mu_trajectory.size(); ++i) {
    out << "  it " << (i + 1) << ": mu=" << format_scalar(rep.mu_trajectory[i])
        << " K=" << format_scalar(rep.contrast_trajectory[i]) << '\n';
  }
}

template <RegimeScalar S>
void report_csv_impl(std::ostream& out, const ExtractionReport<S>& rep, Index source_index,
                     bool header) {
  if (header) out << "source,iteration,mu,kurtosis,flops\n";
  const std::int64_t per_iter = rep.iterations > 0 ? rep.flops / rep.iterations : 0;
  for (std::size_t i = 0; i < rep.mu_trajectory.size(); ++i) {
    out << source_index << ',' << (i + 1) << ',' << format_scalar(rep.mu_trajectory[i]) << ','
        << format_scalar(rep.contrast_trajectory[i]) << ','
        << per_iter * static_cast<std::int64_t>(i + 1) << '\n';
  }
}

}  // namespace

template <RegimeScalar S>
void write_report_log(std::ostream& out, const ExtractionReport<S>& rep, Index source_index) {
  report_log_impl(out, rep, source_index);
}

template <RegimeScalar S>
void write_report_csv(std::ostream& out, const ExtractionReport<S>& rep, Index source_index,
                      bool header) {
  report_csv_impl(out, rep, source_index, header);
}

template void write_report_log<double>(std::ostream&, const ExtractionReport<double>&, Index);
template void write_report_log<cplx>(std::ostream&, const ExtractionReport<cplx>&, Index);
template void write_report_csv<double>(std::ostream&, const ExtractionReport<double>&, Index,
                                       bool);
template void write_report_csv<cplx>(std::ostream&, const ExtractionReport<cplx>&, Index, bool);

}  // namespace rica
