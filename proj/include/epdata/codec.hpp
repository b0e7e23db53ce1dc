#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Lossless encodings for one chunk of a single series.
//
// Datetime ids: runs of consecutive ids, each run stored as (zigzag varint gap
// from the previous run's end, varint length).
//
// Values: one mode byte, then either
//   - decimal: a scale byte e and zigzag varint deltas of k = v * 10^e, used
//     when every value is exactly k / 10^e (the common case for text reports);
//   - xor: bit-packed XOR against the previous value with leading/trailing
//     zero elision.
// The encoder picks the shorter of the two; decoding is bit-exact either way.
namespace epdata::codec
{

enum class ValueMode : std::uint8_t
{
    decimal = 1,
    xor_bits = 2,
};

std::vector<std::uint8_t> encode_ids(std::span<const std::int32_t> sorted_ids);
std::vector<std::int32_t> decode_ids(std::span<const std::uint8_t> bytes, std::size_t count);

std::vector<std::uint8_t> encode_values(std::span<const double> values);
std::vector<double> decode_values(std::span<const std::uint8_t> bytes, std::size_t count);

ValueMode value_mode(std::span<const std::uint8_t> bytes);

} // namespace epdata::codec
