#include "filexpert/utf8.hpp"

#include <array>

namespace filexpert::utf8 {

std::u32string decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        auto b0 = static_cast<unsigned char>(text[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int extra = 0;
        char32_t cp = 0;
        if ((b0 & 0xE0) == 0xC0) {
            extra = 1;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            extra = 2;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            extra = 3;
            cp = b0 & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + extra >= text.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            auto b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

std::string encode(std::u32string_view text) {
    std::string out;
    for (char32_t cp : text) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

namespace {

using namespace std::string_view_literals;

// Base letters for U+00C0..U+017F; '\0' marks code points without a
// plain-letter fold (multiplication/division signs).
constexpr std::string_view latin1_fold =
    "aaaaaaaceeeeiiii"  // C0-CF
    "dnooooo\0ouuuuyts" // D0-DF
    "aaaaaaaceeeeiiii"  // E0-EF
    "dnooooo\0ouuuuyty"sv; // F0-FF
constexpr std::string_view latin_ext_a_fold =
    "aaaaaaccccccccdd" // 100-10F
    "ddeeeeeeeeeegggg" // 110-11F
    "gggghhhhiiiiiiii" // 120-12F
    "iiiijjkkklllllll" // 130-13F
    "lllnnnnnnnnnoooo" // 140-14F
    "oooorrrrrrssssss" // 150-15F
    "ssttttttuuuuuuuu" // 160-16F
    "uuuuwwyyyzzzzzzs"sv; // 170-17F

char32_t fold(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z')
        return cp - 'A' + 'a';
    if (cp >= 0xC0 && cp <= 0xFF) {
        char c = latin1_fold[cp - 0xC0];
        return c ? static_cast<char32_t>(c) : cp;
    }
    if (cp >= 0x100 && cp <= 0x17F)
        return static_cast<char32_t>(latin_ext_a_fold[cp - 0x100]);
    // Combining diacritical marks vanish.
    if (cp >= 0x300 && cp <= 0x36F)
        return 0;
    return cp;
}

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

bool is_punct(char32_t cp) {
    if (cp < 0x80)
        return !((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9') || is_space(cp));
    // Latin-1 punctuation and symbols, general punctuation block.
    return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
           (cp >= 0x2000 && cp <= 0x206F);
}

} // namespace

std::u32string normalize_name(std::string_view name) {
    std::u32string out;
    bool pending_space = false;
    for (char32_t cp : decode(name)) {
        if (is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        cp = fold(cp);
        if (cp == 0 || is_punct(cp))
            continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(cp);
    }
    return out;
}

} // namespace filexpert::utf8
