#include "epdata/codec.hpp"

#include "epdata/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <optional>

namespace epdata::codec
{

namespace
{

[[noreturn]] void corrupt(const char* what)
{
    fail(ErrorCode::ConstraintViolation, std::string("corrupt timeseries chunk: ") + what);
}

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value)
{
    while (value >= 0x80)
    {
        out.push_back(static_cast<std::uint8_t>(value | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

std::uint64_t zigzag(std::int64_t value)
{
    return (static_cast<std::uint64_t>(value) << 1) ^ static_cast<std::uint64_t>(value >> 63);
}

std::int64_t unzigzag(std::uint64_t value)
{
    return static_cast<std::int64_t>(value >> 1) ^ -static_cast<std::int64_t>(value & 1);
}

class ByteReader
{
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t byte()
    {
        if (pos_ >= bytes_.size())
        {
            corrupt("truncated");
        }
        return bytes_[pos_++];
    }

    std::uint64_t varint()
    {
        std::uint64_t value = 0;
        for (int shift = 0; shift < 64; shift += 7)
        {
            const std::uint8_t b = byte();
            value |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if ((b & 0x80) == 0)
            {
                return value;
            }
        }
        corrupt("varint overflow");
    }

    std::size_t position() const { return pos_; }
    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_{0};
};

class BitWriter
{
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void write(std::uint64_t value, int bits)
    {
        for (int i = bits - 1; i >= 0; --i)
        {
            if (used_ == 0)
            {
                out_.push_back(0);
            }
            if ((value >> i) & 1U)
            {
                out_.back() |= static_cast<std::uint8_t>(0x80U >> used_);
            }
            used_ = (used_ + 1) % 8;
        }
    }

private:
    std::vector<std::uint8_t>& out_;
    int used_{0};
};

class BitReader
{
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t read(int bits)
    {
        std::uint64_t value = 0;
        for (int i = 0; i < bits; ++i)
        {
            const std::size_t byte = pos_ / 8;
            if (byte >= bytes_.size())
            {
                corrupt("bit stream truncated");
            }
            value = (value << 1) | ((bytes_[byte] >> (7 - pos_ % 8)) & 1U);
            ++pos_;
        }
        return value;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_{0};
};

constexpr int kMaxDecimalScale = 15;

constexpr std::array<double, kMaxDecimalScale + 1> kPow10{1e0, 1e1, 1e2,  1e3,  1e4,  1e5,  1e6,  1e7,
                                                          1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15};

std::optional<std::int64_t> decimal_mantissa(double value, int scale)
{
    const double scaled = value * kPow10[scale];
    if (!(std::fabs(scaled) < 9007199254740992.0)) // 2^53
    {
        return std::nullopt;
    }
    const auto k = static_cast<std::int64_t>(std::llround(scaled));
    const double back = static_cast<double>(k) / kPow10[scale];
    if (std::bit_cast<std::uint64_t>(back) != std::bit_cast<std::uint64_t>(value))
    {
        return std::nullopt;
    }
    return k;
}

std::optional<std::vector<std::uint8_t>> encode_decimal(std::span<const double> values)
{
    int scale = 0;
    std::vector<std::int64_t> mantissas;
    for (std::size_t i = 0; i < values.size();)
    {
        if (auto k = decimal_mantissa(values[i], scale))
        {
            mantissas.push_back(*k);
            ++i;
            continue;
        }
        // Raise the scale and restart; earlier values stay exact at a finer scale.
        do
        {
            ++scale;
        } while (scale <= kMaxDecimalScale && !decimal_mantissa(values[i], scale));
        if (scale > kMaxDecimalScale)
        {
            return std::nullopt;
        }
        mantissas.clear();
        i = 0;
    }

    std::vector<std::uint8_t> out{static_cast<std::uint8_t>(ValueMode::decimal), static_cast<std::uint8_t>(scale)};
    std::int64_t previous = 0;
    for (std::int64_t k : mantissas)
    {
        put_varint(out, zigzag(k - previous));
        previous = k;
    }
    return out;
}

std::vector<std::uint8_t> encode_xor(std::span<const double> values)
{
    std::vector<std::uint8_t> out{static_cast<std::uint8_t>(ValueMode::xor_bits)};
    BitWriter bits(out);
    std::uint64_t previous = 0;
    int window_lead = -1;
    int window_trail = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const auto current = std::bit_cast<std::uint64_t>(values[i]);
        if (i == 0)
        {
            bits.write(current, 64);
            previous = current;
            continue;
        }
        const std::uint64_t x = current ^ previous;
        previous = current;
        if (x == 0)
        {
            bits.write(0, 1);
            continue;
        }
        bits.write(1, 1);
        const int lead = std::min(std::countl_zero(x), 31);
        const int trail = std::countr_zero(x);
        if (window_lead >= 0 && lead >= window_lead && trail >= window_trail)
        {
            bits.write(0, 1);
            bits.write(x >> window_trail, 64 - window_lead - window_trail);
            continue;
        }
        const int meaningful = 64 - lead - trail;
        bits.write(1, 1);
        bits.write(static_cast<std::uint64_t>(lead), 5);
        bits.write(static_cast<std::uint64_t>(meaningful - 1), 6);
        bits.write(x >> trail, meaningful);
        window_lead = lead;
        window_trail = trail;
    }
    return out;
}

std::vector<double> decode_xor(std::span<const std::uint8_t> payload, std::size_t count)
{
    std::vector<double> out;
    out.reserve(count);
    BitReader bits(payload);
    std::uint64_t previous = 0;
    int window_lead = 0;
    int window_trail = 0;
    for (std::size_t i = 0; i < count; ++i)
    {
        if (i == 0)
        {
            previous = bits.read(64);
        }
        else if (bits.read(1) != 0)
        {
            if (bits.read(1) != 0)
            {
                window_lead = static_cast<int>(bits.read(5));
                const int meaningful = static_cast<int>(bits.read(6)) + 1;
                window_trail = 64 - window_lead - meaningful;
                if (window_trail < 0)
                {
                    corrupt("xor window");
                }
            }
            const int meaningful = 64 - window_lead - window_trail;
            previous ^= bits.read(meaningful) << window_trail;
        }
        out.push_back(std::bit_cast<double>(previous));
    }
    return out;
}

} // namespace

std::vector<std::uint8_t> encode_ids(std::span<const std::int32_t> sorted_ids)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> runs; // (start, length)
    for (std::int32_t id : sorted_ids)
    {
        if (!runs.empty() && runs.back().first + runs.back().second == id)
        {
            ++runs.back().second;
        }
        else
        {
            runs.emplace_back(id, 1);
        }
    }
    std::vector<std::uint8_t> out;
    put_varint(out, runs.size());
    std::int64_t previous_end = 0;
    for (const auto& [start, length] : runs)
    {
        put_varint(out, zigzag(start - previous_end));
        put_varint(out, static_cast<std::uint64_t>(length));
        previous_end = start + length;
    }
    return out;
}

std::vector<std::int32_t> decode_ids(std::span<const std::uint8_t> bytes, std::size_t count)
{
    ByteReader in(bytes);
    const std::uint64_t runs = in.varint();
    std::vector<std::int32_t> out;
    out.reserve(count);
    std::int64_t previous_end = 0;
    for (std::uint64_t r = 0; r < runs; ++r)
    {
        const std::int64_t start = previous_end + unzigzag(in.varint());
        const auto length = static_cast<std::int64_t>(in.varint());
        if (length <= 0 || out.size() + static_cast<std::size_t>(length) > count)
        {
            corrupt("id run length");
        }
        for (std::int64_t i = 0; i < length; ++i)
        {
            out.push_back(static_cast<std::int32_t>(start + i));
        }
        previous_end = start + length;
    }
    if (out.size() != count)
    {
        corrupt("id count");
    }
    return out;
}

std::vector<std::uint8_t> encode_values(std::span<const double> values)
{
    std::vector<std::uint8_t> xor_bytes = encode_xor(values);
    if (auto decimal = encode_decimal(values); decimal && decimal->size() < xor_bytes.size())
    {
        return std::move(*decimal);
    }
    return xor_bytes;
}

std::vector<double> decode_values(std::span<const std::uint8_t> bytes, std::size_t count)
{
    ByteReader in(bytes);
    const auto mode = static_cast<ValueMode>(in.byte());
    if (mode == ValueMode::xor_bits)
    {
        return decode_xor(in.rest(), count);
    }
    if (mode != ValueMode::decimal)
    {
        corrupt("unknown value mode");
    }
    const int scale = in.byte();
    if (scale > kMaxDecimalScale)
    {
        corrupt("decimal scale");
    }
    std::vector<double> out;
    out.reserve(count);
    std::int64_t k = 0;
    for (std::size_t i = 0; i < count; ++i)
    {
        k += unzigzag(in.varint());
        out.push_back(static_cast<double>(k) / kPow10[scale]);
    }
    return out;
}

ValueMode value_mode(std::span<const std::uint8_t> bytes)
{
    if (bytes.empty())
    {
        corrupt("empty value block");
    }
    return static_cast<ValueMode>(bytes.front());
}

} // namespace epdata::codec
