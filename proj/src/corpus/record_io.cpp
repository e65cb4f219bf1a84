#include "refinery/corpus/record_io.hpp"

#include "refinery/util/io.hpp"

namespace refinery::corpus {

using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::string>& model_keys() {
    static const std::vector<std::string> keys = {"id",   "dump",  "url",    "fetched_at", "lang",
                                                  "text", "stage", "safety", "quality"};
    return keys;
}

bool is_model_key(const std::string& key) {
    for (const auto& k : model_keys()) {
        if (k == key) return true;
    }
    return false;
}

ojson safety_to_json(const SafetyAnnotations& s) {
    ojson j = ojson::object();
    j["domain_blocked"] = s.domain_blocked;
    ojson hits = ojson::array();
    for (const auto& h : s.blockword_hits) hits.push_back({{"word", h.word}, {"offset", h.offset}});
    j["blockword_hits"] = std::move(hits);
    if (s.toxicity) j["toxicity"] = *s.toxicity;
    if (s.pornography) j["pornography"] = *s.pornography;
    ojson spans = ojson::array();
    for (const auto& p : s.pii_spans) spans.push_back({{"start", p.start}, {"end", p.end}, {"type", p.type}});
    j["pii_spans"] = std::move(spans);
    j["discard"] = s.discard;
    return j;
}

ojson quality_to_json(const QualityAnnotations& q) {
    ojson j = ojson::object();
    if (q.ad_score) j["ad_score"] = *q.ad_score;
    if (q.fluency_score) j["fluency_score"] = *q.fluency_score;
    if (q.fluency_dims) {
        ojson dims = ojson::object();
        for (const auto& [k, v] : *q.fluency_dims) dims[k] = v;
        j["fluency_dims"] = std::move(dims);
    }
    j["selected"] = q.selected;
    return j;
}

std::optional<double> opt_number(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw RecordFormatError(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

SafetyAnnotations safety_from_json(const ojson& j) {
    if (!j.is_object()) throw RecordFormatError("'safety' must be an object");
    SafetyAnnotations s;
    s.domain_blocked = j.value("domain_blocked", false);
    if (auto it = j.find("blockword_hits"); it != j.end()) {
        for (const auto& h : *it) s.blockword_hits.push_back({h.at("word").get<std::string>(), h.at("offset").get<std::size_t>()});
    }
    s.toxicity = opt_number(j, "toxicity");
    s.pornography = opt_number(j, "pornography");
    if (auto it = j.find("pii_spans"); it != j.end()) {
        for (const auto& p : *it) {
            s.pii_spans.push_back({p.at("start").get<std::size_t>(), p.at("end").get<std::size_t>(),
                                   p.at("type").get<std::string>()});
        }
    }
    s.discard = j.value("discard", false);
    return s;
}

QualityAnnotations quality_from_json(const ojson& j) {
    if (!j.is_object()) throw RecordFormatError("'quality' must be an object");
    QualityAnnotations q;
    q.ad_score = opt_number(j, "ad_score");
    q.fluency_score = opt_number(j, "fluency_score");
    if (auto it = j.find("fluency_dims"); it != j.end() && !it->is_null()) {
        std::map<std::string, double> dims;
        for (auto d = it->begin(); d != it->end(); ++d) dims[d.key()] = d.value().get<double>();
        q.fluency_dims = std::move(dims);
    }
    q.selected = j.value("selected", false);
    return q;
}

std::string required_string(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw RecordFormatError(std::string("missing required field '") + key + "'");
    if (!it->is_string()) throw RecordFormatError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::string optional_string(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_string()) throw RecordFormatError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

ojson to_json(const Document& doc) {
    ojson j = ojson::object();
    j["id"] = doc.id;
    j["dump"] = doc.dump_id;
    if (!doc.url.empty()) j["url"] = doc.url;
    if (!doc.fetched_at.empty()) j["fetched_at"] = doc.fetched_at;
    if (!doc.language.empty()) j["lang"] = doc.language;
    j["stage"] = std::string(to_string(doc.stage));
    j["text"] = doc.text;
    if (doc.safety) j["safety"] = safety_to_json(*doc.safety);
    if (doc.quality) j["quality"] = quality_to_json(*doc.quality);
    for (auto it = doc.extra.begin(); it != doc.extra.end(); ++it) {
        if (!is_model_key(it.key())) j[it.key()] = it.value();
    }
    return j;
}

std::string to_json_line(const Document& doc) {
    return to_json(doc).dump(-1, ' ', false, ojson::error_handler_t::replace);
}

Document document_from_json(const ojson& j) {
    if (!j.is_object()) throw RecordFormatError("record is not a JSON object");
    Document doc;
    try {
        doc.id = required_string(j, "id");
        doc.dump_id = required_string(j, "dump");
        doc.text = required_string(j, "text");
        doc.url = optional_string(j, "url");
        doc.fetched_at = optional_string(j, "fetched_at");
        doc.language = optional_string(j, "lang");
        if (auto it = j.find("stage"); it != j.end() && !it->is_null()) {
            auto stage = parse_stage(it->get<std::string>());
            if (!stage) throw RecordFormatError("unknown stage '" + it->get<std::string>() + "'");
            doc.stage = *stage;
        }
        if (auto it = j.find("safety"); it != j.end() && !it->is_null()) doc.safety = safety_from_json(*it);
        if (auto it = j.find("quality"); it != j.end() && !it->is_null()) doc.quality = quality_from_json(*it);
    } catch (const nlohmann::json::exception& e) {
        throw RecordFormatError(e.what());
    }
    return doc;
}

RecordReader::RecordReader(const std::filesystem::path& path)
    : in_(std::make_unique<util::InputFile>(path)) {}

RecordReader::~RecordReader() = default;
RecordReader::RecordReader(RecordReader&&) noexcept = default;

std::optional<RecordReader::Item> RecordReader::next() {
    while (auto line = in_->read_line()) {
        ++line_;
        if (!line->empty() && line->back() == '\r') line->pop_back();
        if (line->find_first_not_of(" \t") == std::string::npos) continue;
        try {
            // Parse into an ordered tree so unknown fields keep their order.
            ojson parsed = ojson::parse(*line);
            Document doc = document_from_json(parsed);
            for (auto it = parsed.begin(); it != parsed.end(); ++it) {
                if (!is_model_key(it.key())) doc.extra[it.key()] = it.value();
            }
            return Item{std::move(doc)};
        } catch (const nlohmann::json::exception& e) {
            return Item{RecordError{line_, e.what()}};
        } catch (const RecordFormatError& e) {
            return Item{RecordError{line_, e.what()}};
        }
    }
    return std::nullopt;
}

ReadResult read_records(const std::filesystem::path& path) {
    ReadResult result;
    RecordReader reader(path);
    while (auto item = reader.next()) {
        if (auto* doc = std::get_if<Document>(&*item)) {
            result.documents.push_back(std::move(*doc));
        } else {
            result.errors.push_back(std::get<RecordError>(*item));
        }
    }
    return result;
}

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : out_(std::make_unique<util::AtomicWriter>(path)) {}

RecordWriter::~RecordWriter() = default;

void RecordWriter::write(const Document& doc) {
    std::string line = to_json_line(doc);
    line += '\n';
    out_->write(line);
    ++count_;
}

std::size_t RecordWriter::commit() {
    out_->commit();
    return count_;
}

std::size_t write_records(const std::vector<Document>& docs, const std::filesystem::path& path) {
    RecordWriter w(path);
    for (const auto& d : docs) w.write(d);
    return w.commit();
}

}  // namespace refinery::corpus
