#pragma once

#include <filesystem>
#include <iosfwd>

#include "pencilcrt/signal_model.hpp"

namespace pencilcrt {

/// Binary stream file layout (all integers and floats little-endian):
///
///   bytes 0-7   magic "SNYQSTRM"
///   bytes 8-11  uint32 header length H
///   next H      UTF-8 JSON {"rate_hz": r, "n_samples": n, "start_index": s}
///   then        n pairs of IEEE-754 float64 (real, imaginary)
///
/// Readers reject unknown header keys, short payloads and trailing bytes.
inline constexpr char kStreamMagic[8] = {'S', 'N', 'Y', 'Q', 'S', 'T', 'R', 'M'};

void write_stream(std::ostream& out, const SampledStream& stream);
SampledStream read_stream(std::istream& in);

/// File variants; failures throw Error(ErrorKind::Io).
void write_stream_file(const std::filesystem::path& path, const SampledStream& stream);
SampledStream read_stream_file(const std::filesystem::path& path);

}  // namespace pencilcrt
