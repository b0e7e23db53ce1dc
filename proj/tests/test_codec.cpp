#include "epdata/codec.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace epdata;

namespace
{

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

} // namespace

TEST_CASE("id runs round-trip")
{
    const std::vector<std::int32_t> cases[] = {
        {},
        {1},
        {1, 2, 3, 4, 5},
        {5, 6, 10, 11, 12, 100},
        {1, 3, 5, 7, 9},
        {2147483000, 2147483001, 2147483647},
    };
    for (const auto& ids : cases)
    {
        const auto bytes = codec::encode_ids(ids);
        CHECK(codec::decode_ids(bytes, ids.size()) == ids);
    }
}

TEST_CASE("a contiguous run of ids encodes in a few bytes")
{
    std::vector<std::int32_t> ids(2048);
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        ids[i] = static_cast<std::int32_t>(1000 + i);
    }
    CHECK(codec::encode_ids(ids).size() <= 6);
}

TEST_CASE("random sorted ids round-trip")
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<std::int32_t> ids;
        std::int32_t next = static_cast<std::int32_t>(rng() % 1000) + 1;
        const std::size_t n = rng() % 3000;
        for (std::size_t i = 0; i < n; ++i)
        {
            ids.push_back(next);
            next += 1 + static_cast<std::int32_t>(rng() % 4 == 0 ? rng() % 50 : 0);
        }
        CHECK(codec::decode_ids(codec::encode_ids(ids), ids.size()) == ids);
    }
}

TEST_CASE("decimal values pick the decimal mode and round-trip")
{
    const std::vector<double> v{21.5, 21.55, 21.6, -3.25, 0.0, 100.0, 1e-3};
    const auto bytes = codec::encode_values(v);
    CHECK(codec::value_mode(bytes) == codec::ValueMode::decimal);
    CHECK(same_bits(codec::decode_values(bytes, v.size()), v));
}

TEST_CASE("arbitrary doubles round-trip bit for bit")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> v(1 + rng() % 2048);
        for (double& x : v)
        {
            switch (rng() % 4)
            {
            case 0:
                x = std::bit_cast<double>(rng());
                if (!std::isfinite(x))
                {
                    x = 1.0;
                }
                break;
            case 1:
                x = std::ldexp(static_cast<double>(rng() % 100000), -static_cast<int>(rng() % 40));
                break;
            case 2:
                x = static_cast<double>(static_cast<std::int64_t>(rng() % 2000000) - 1000000) / 100.0;
                break;
            default:
                x = -0.0;
            }
        }
        const auto back = codec::decode_values(codec::encode_values(v), v.size());
        CHECK(same_bits(back, v));
    }
}

TEST_CASE("special finite values survive")
{
    const std::vector<double> v{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                                std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::min(),
                                -0.0, 0.1, 1.0 / 3.0};
    CHECK(same_bits(codec::decode_values(codec::encode_values(v), v.size()), v));
}

TEST_CASE("negative zero is not folded into the decimal mode")
{
    const std::vector<double> v{1.5, -0.0, 2.5};
    CHECK(same_bits(codec::decode_values(codec::encode_values(v), v.size()), v));
}

TEST_CASE("slowly varying two-decimal series compress well")
{
    std::vector<double> v;
    double x = 20.0;
    std::mt19937 rng(1);
    for (int i = 0; i < 2048; ++i)
    {
        x += static_cast<double>(static_cast<int>(rng() % 21) - 10) / 100.0;
        v.push_back(std::round(x * 100.0) / 100.0);
    }
    const auto bytes = codec::encode_values(v);
    CHECK(bytes.size() < v.size() * sizeof(double) / 4);
    CHECK(same_bits(codec::decode_values(bytes, v.size()), v));
}
