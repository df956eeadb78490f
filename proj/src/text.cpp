#include "gitnet/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gitnet {

std::vector<char32_t> decode_utf8(std::string_view bytes)
{
    std::vector<char32_t> out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto n = bytes.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + len <= n;
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto bk = static_cast<unsigned char>(bytes[i + k]);
            if ((bk & 0xC0) != 0x80)
                ok = false;
            else
                cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok) {
            out.push_back(b0); // invalid byte stands alone
            ++i;
        } else {
            out.push_back(cp);
            i += len;
        }
    }
    return out;
}

int char_count(std::string_view bytes)
{
    return static_cast<int>(decode_utf8(bytes).size());
}

std::int64_t levenshtein(std::string_view a_bytes, std::string_view b_bytes)
{
    std::vector<char32_t> a = decode_utf8(a_bytes);
    std::vector<char32_t> b = decode_utf8(b_bytes);

    // Strip common prefix/suffix, then two-row DP over the remainder.
    std::size_t lo = 0;
    while (lo < a.size() && lo < b.size() && a[lo] == b[lo])
        ++lo;
    std::size_t ae = a.size(), be = b.size();
    while (ae > lo && be > lo && a[ae - 1] == b[be - 1]) {
        --ae;
        --be;
    }
    const std::size_t m = ae - lo, n = be - lo;
    if (m == 0)
        return static_cast<std::int64_t>(n);
    if (n == 0)
        return static_cast<std::int64_t>(m);

    std::vector<std::int64_t> row(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        row[j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= m; ++i) {
        std::int64_t diag = row[0];
        row[0] = static_cast<std::int64_t>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            const std::int64_t sub = diag + (a[lo + i - 1] == b[lo + j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
        }
    }
    return row[n];
}

double entropy(std::string_view bytes)
{
    if (bytes.empty())
        return 0.0;
    std::array<std::size_t, 256> counts{};
    for (unsigned char c : bytes)
        ++counts[c];
    const double n = static_cast<double>(bytes.size());
    double s = 0.0;
    for (std::size_t c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / n;
        s -= p * std::log2(p);
    }
    return s;
}

bool looks_binary(std::string_view content)
{
    const auto limit = std::min<std::size_t>(content.size(), 8000);
    return content.substr(0, limit).find('\0') != std::string_view::npos;
}

} // namespace gitnet
