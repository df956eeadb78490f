#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gitnet::testing {

// Brute-force full-matrix edit-distance oracle, with its own UTF-8 decoder,
// kept independent of the library implementation.
inline std::vector<std::uint32_t> oracle_decode(std::string_view s)
{
    std::vector<std::uint32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((b & 0x80) == 0)
            len = 1;
        else if ((b & 0xE0) == 0xC0)
            len = 2;
        else if ((b & 0xF0) == 0xE0)
            len = 3;
        else if ((b & 0xF8) == 0xF0)
            len = 4;
        else {
            cps.push_back(b);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            cps.push_back(b);
            ++i;
            continue;
        }
        std::uint32_t cp = len == 1 ? b : (b & (0xFF >> (len + 1)));
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok) {
            cps.push_back(b);
            ++i;
        } else {
            cps.push_back(cp);
            i += len;
        }
    }
    return cps;
}

inline std::int64_t levenshtein_oracle(std::string_view a_str, std::string_view b_str)
{
    const auto a = oracle_decode(a_str);
    const auto b = oracle_decode(b_str);
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::vector<std::int64_t>> d(m + 1, std::vector<std::int64_t>(n + 1));
    for (std::size_t i = 0; i <= m; ++i)
        d[i][0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 0; j <= n; ++j)
        d[0][j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= m; ++i)
        for (std::size_t j = 1; j <= n; ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[m][n];
}

} // namespace gitnet::testing
