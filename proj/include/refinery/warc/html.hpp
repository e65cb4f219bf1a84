#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace refinery::warc {

// Charset label from a Content-Type value ("text/html; charset=ISO-8859-1"),
// lowercased; empty if absent.
std::string charset_from_content_type(std::string_view content_type);

// Charset declared by a <meta charset> or <meta http-equiv="Content-Type">
// tag near the start of the document; empty if none.
std::string sniff_meta_charset(std::string_view html);

// Converts bytes in `charset` to UTF-8. Unknown labels and "utf-8" fall back
// to UTF-8 with ill-formed sequences replaced by U+FFFD.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset);

// Resolution order: HTTP header, then meta tag, then UTF-8.
std::string decode_html(std::string_view bytes, std::string_view content_type_header);

// Decodes character references (&amp; &#233; &#xE9;) in `text`.
std::string decode_entities(std::string_view text);

// Main-text extraction from decoded HTML.
class TextExtractor {
public:
    virtual ~TextExtractor() = default;
    virtual std::string extract(std::string_view html) const = 0;
};

// Text-density extractor. Script, style, nav, header, footer and form
// subtrees (plus head, noscript, template, svg, iframe, object, title) are
// discarded. Every run of inline content inside a block element is a
// candidate block scored as
//     text length / (1 + inline elements + link text length)
// and blocks scoring at least keep_fraction of the best block are emitted, one
// line each, in document order. <br> breaks a block into several lines.
class DensityExtractor final : public TextExtractor {
public:
    explicit DensityExtractor(double keep_fraction = 0.2) : keep_fraction_(keep_fraction) {}
    std::string extract(std::string_view html) const override;

private:
    double keep_fraction_;
};

// DensityExtractor with default settings.
std::string extract_text(std::string_view html);

}  // namespace refinery::warc
