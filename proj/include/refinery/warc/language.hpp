#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace refinery::warc {

struct LanguageVerdict {
    std::string tag;
    double confidence = 0.0;  // in [0, 1]
};

// Character-trigram language identifier. Each built-in language has a
// profile of trigram frequencies taken from a sample text; the input's
// profile is compared by cosine similarity. Confidence is the relative margin
// (best - second) / best.
class LanguageDetector {
public:
    LanguageDetector();
    LanguageVerdict detect(std::string_view text) const;
    std::vector<std::string> languages() const;

    // Inputs shorter than this many characters get ("und", 0).
    static constexpr std::size_t kMinChars = 20;

private:
    struct Profile;
    std::vector<Profile> profiles_;
};

// Shared detector instance.
const LanguageDetector& default_language_detector();

inline LanguageVerdict detect_language(std::string_view text) { return default_language_detector().detect(text); }

}  // namespace refinery::warc
