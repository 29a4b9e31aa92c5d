#pragma once

#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

#include "dmr/model.hpp"

namespace dmr {

namespace detail {

/// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string fmt_double(double v) {
    if (!std::isfinite(v)) throw ModelError("model serialization: non-finite value");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_vector(const FeatureVector& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_double(v[i]);
    }
    out += "]";
    return out;
}

inline std::string fmt_id_list(const std::vector<std::int64_t>& ids) {
    std::string out = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(ids[i]);
    }
    out += "]";
    return out;
}

inline std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

}  // namespace detail

/// Semantic and referential checks shared by save and load. Errors name the
/// offending field by path.
inline void validate_model(const DmrModel& m) {
    if (m.format_version != kModelFormatVersion) {
        throw ModelError("unsupported format_version " + std::to_string(m.format_version));
    }
    if (m.dimensionality == 0) throw ModelError("dimensionality: must be positive");
    if (!(m.threshold >= 0.0 && m.threshold <= 1.0)) throw ModelError("threshold: outside [0,1]");
    const std::size_t dim = m.dimensionality;
    if (m.standardization.per_feature_mean.size() != dim) {
        throw ModelError("standardization.per_feature_mean: wrong length");
    }
    if (m.standardization.per_feature_std.size() != dim) {
        throw ModelError("standardization.per_feature_std: wrong length");
    }
    for (double s : m.standardization.per_feature_std) {
        if (!(s > 0.0)) throw ModelError("standardization.per_feature_std: non-positive entry");
    }
    if (m.classes.empty()) throw ModelError("classes: empty");

    std::set<std::int64_t> ids;
    std::map<std::int64_t, std::string> cloud_class;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cm = m.classes[c];
        const std::string path = "classes[" + std::to_string(c) + "]";
        if (cm.class_label.empty()) throw ModelError(path + ".class_label: empty");
        if (c > 0 && !(m.classes[c - 1].class_label < cm.class_label)) {
            throw ModelError(path + ".class_label: classes not sorted by label");
        }
        if (cm.stats.count < 1) throw ModelError(path + ".stats.count: must be positive");
        if (cm.stats.mean.size() != dim) throw ModelError(path + ".stats.mean: wrong length");
        if (cm.stats.variance < 0.0) throw ModelError(path + ".stats.variance: negative");
        if (cm.clouds.empty()) throw ModelError(path + ".clouds: empty");
        for (std::size_t k = 0; k < cm.clouds.size(); ++k) {
            const auto& cloud = cm.clouds[k];
            const std::string cpath = path + ".clouds[" + std::to_string(k) + "]";
            if (!ids.insert(cloud.id).second) {
                throw ModelError(cpath + ".id: duplicate cloud id " + std::to_string(cloud.id));
            }
            cloud_class[cloud.id] = cm.class_label;
            if (cloud.class_label != cm.class_label) {
                throw ModelError(cpath + ".class_label: does not match owning class");
            }
            if (cloud.center.size() != dim) throw ModelError(cpath + ".center: wrong length");
            if (cloud.support < 1) throw ModelError(cpath + ".support: must be positive");
            if (cloud.variance < 0.0) throw ModelError(cpath + ".variance: negative");
        }
    }

    std::set<std::int64_t> partitioned;
    for (std::size_t g = 0; g < m.megaclouds.size(); ++g) {
        const auto& mc = m.megaclouds[g];
        const std::string path = "megaclouds[" + std::to_string(g) + "]";
        if (mc.member_cloud_ids.empty()) throw ModelError(path + ".member_cloud_ids: empty");
        for (std::int64_t id : mc.member_cloud_ids) {
            const auto it = cloud_class.find(id);
            if (it == cloud_class.end()) {
                throw ModelError(path + ".member_cloud_ids: unknown cloud id " + std::to_string(id));
            }
            if (it->second != mc.class_label) {
                throw ModelError(path + ".member_cloud_ids: cloud " + std::to_string(id) +
                                 " belongs to class \"" + it->second + "\"");
            }
            if (!partitioned.insert(id).second) {
                throw ModelError(path + ".member_cloud_ids: cloud " + std::to_string(id) +
                                 " appears in more than one mega-cloud");
            }
        }
    }
    if (!m.megaclouds.empty() && partitioned.size() != ids.size()) {
        throw ModelError("megaclouds: not a partition of the clouds");
    }

    if (!m.ranking.order.empty() || !m.ranking.per_cloud_error.empty()) {
        std::set<std::int64_t> ranked;
        for (std::int64_t id : m.ranking.order) {
            if (ids.find(id) == ids.end()) {
                throw ModelError("ranking.order: unknown cloud id " + std::to_string(id));
            }
            if (!ranked.insert(id).second) {
                throw ModelError("ranking.order: duplicate cloud id " + std::to_string(id));
            }
        }
        if (ranked.size() != ids.size()) throw ModelError("ranking.order: not a permutation of the clouds");
        for (const auto& [id, err] : m.ranking.per_cloud_error) {
            if (ids.find(id) == ids.end()) {
                throw ModelError("ranking.per_cloud_error: unknown cloud id " + std::to_string(id));
            }
            if (!(err >= 0.0 && err <= 1.0)) {
                throw ModelError("ranking.per_cloud_error: error outside [0,1] for cloud " +
                                 std::to_string(id));
            }
        }
        if (m.ranking.per_cloud_error.size() != ids.size()) {
            throw ModelError("ranking.per_cloud_error: does not cover every cloud");
        }
    }
}

/// Deterministic serialization: fixed field order, fixed layout, 17
/// significant digits. The same model always yields the same bytes.
inline std::string model_to_json_string(const DmrModel& m) {
    using detail::escape_json;
    using detail::fmt_double;
    using detail::fmt_id_list;
    using detail::fmt_vector;
    validate_model(m);

    std::string out;
    out += "{\n";
    out += "  \"format_version\": " + std::to_string(m.format_version) + ",\n";
    out += "  \"dimensionality\": " + std::to_string(m.dimensionality) + ",\n";
    out += "  \"threshold\": " + fmt_double(m.threshold) + ",\n";
    out += "  \"standardization\": {\n";
    out += "    \"per_feature_mean\": " + fmt_vector(m.standardization.per_feature_mean) + ",\n";
    out += "    \"per_feature_std\": " + fmt_vector(m.standardization.per_feature_std) + "\n";
    out += "  },\n";

    out += "  \"classes\": [\n";
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cm = m.classes[c];
        out += "    {\n";
        out += "      \"class_label\": \"" + escape_json(cm.class_label) + "\",\n";
        out += "      \"stats\": {\"count\": " + std::to_string(cm.stats.count) +
               ", \"mean\": " + fmt_vector(cm.stats.mean) +
               ", \"mean_sq_norm\": " + fmt_double(cm.stats.mean_sq_norm) +
               ", \"variance\": " + fmt_double(cm.stats.variance) + "},\n";
        out += "      \"clouds\": [\n";
        for (std::size_t k = 0; k < cm.clouds.size(); ++k) {
            const auto& cloud = cm.clouds[k];
            out += "        {\"id\": " + std::to_string(cloud.id) +
                   ", \"center\": " + fmt_vector(cloud.center) +
                   ", \"support\": " + std::to_string(cloud.support) +
                   ", \"mean_sq_norm\": " + fmt_double(cloud.mean_sq_norm) +
                   ", \"variance\": " + fmt_double(cloud.variance) +
                   ", \"source_sample_id\": " +
                   (cloud.source_sample_id.has_value() ? std::to_string(*cloud.source_sample_id)
                                                       : std::string("null")) +
                   ", \"synthetic\": " + (cloud.synthetic ? "true" : "false") + "}";
            out += k + 1 < cm.clouds.size() ? ",\n" : "\n";
        }
        out += "      ]\n";
        out += c + 1 < m.classes.size() ? "    },\n" : "    }\n";
    }
    out += "  ],\n";

    out += "  \"megaclouds\": [\n";
    for (std::size_t g = 0; g < m.megaclouds.size(); ++g) {
        const auto& mc = m.megaclouds[g];
        out += "    {\"id\": " + std::to_string(mc.id) + ", \"class_label\": \"" +
               escape_json(mc.class_label) + "\", \"member_cloud_ids\": " +
               fmt_id_list(mc.member_cloud_ids) + "}";
        out += g + 1 < m.megaclouds.size() ? ",\n" : "\n";
    }
    out += "  ],\n";

    out += "  \"ranking\": {\n";
    out += "    \"order\": " + fmt_id_list(m.ranking.order) + ",\n";
    out += "    \"per_cloud_error\": [";
    {
        std::size_t i = 0;
        for (const auto& [id, err] : m.ranking.per_cloud_error) {
            if (i++ > 0) out += ", ";
            out += "[" + std::to_string(id) + ", " + fmt_double(err) + "]";
        }
    }
    out += "]\n";
    out += "  },\n";

    out += "  \"provenance\": {\"seed\": " + std::to_string(m.provenance.seed) +
           ", \"balance\": " + (m.provenance.balance ? "true" : "false") +
           ", \"balance_cap\": " + std::to_string(m.provenance.balance_cap) + "}\n";
    out += "}\n";
    return out;
}

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j, const std::string& path,
                                        const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ModelError(path + key + ": missing");
    return *it;
}

inline double json_double(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_number()) throw ModelError(path + key + ": not a number");
    return v.get<double>();
}

inline std::int64_t json_int(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_number_integer()) throw ModelError(path + key + ": not an integer");
    return v.get<std::int64_t>();
}

inline std::string json_string(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_string()) throw ModelError(path + key + ": not a string");
    return v.get<std::string>();
}

inline bool json_bool(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_boolean()) throw ModelError(path + key + ": not a boolean");
    return v.get<bool>();
}

inline FeatureVector json_vector(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_array()) throw ModelError(path + key + ": not an array");
    FeatureVector out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ModelError(path + key + ": not numeric");
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::vector<std::int64_t> json_id_list(const nlohmann::json& j, const std::string& path,
                                              const char* key) {
    const auto& v = json_field(j, path, key);
    if (!v.is_array()) throw ModelError(path + key + ": not an array");
    std::vector<std::int64_t> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ModelError(path + key + ": not an integer list");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

}  // namespace detail

inline DmrModel model_from_json(const nlohmann::json& j) {
    using namespace detail;
    if (!j.is_object()) throw ModelError("model root: not an object");

    DmrModel m;
    m.format_version = static_cast<int>(json_int(j, "", "format_version"));
    if (m.format_version != kModelFormatVersion) {
        throw ModelError("unsupported format_version " + std::to_string(m.format_version));
    }
    const std::int64_t dim = json_int(j, "", "dimensionality");
    if (dim < 1) throw ModelError("dimensionality: must be positive");
    m.dimensionality = static_cast<std::size_t>(dim);
    m.threshold = json_double(j, "", "threshold");

    const auto& st = json_field(j, "", "standardization");
    m.standardization.per_feature_mean = json_vector(st, "standardization.", "per_feature_mean");
    m.standardization.per_feature_std = json_vector(st, "standardization.", "per_feature_std");

    const auto& classes = json_field(j, "", "classes");
    if (!classes.is_array()) throw ModelError("classes: not an array");
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const std::string path = "classes[" + std::to_string(c) + "].";
        const auto& jc = classes[c];
        ClassModel cm;
        cm.class_label = json_string(jc, path, "class_label");
        const auto& js = json_field(jc, path, "stats");
        cm.stats.count = json_int(js, path + "stats.", "count");
        cm.stats.mean = json_vector(js, path + "stats.", "mean");
        cm.stats.mean_sq_norm = json_double(js, path + "stats.", "mean_sq_norm");
        cm.stats.variance = json_double(js, path + "stats.", "variance");
        const auto& jclouds = json_field(jc, path, "clouds");
        if (!jclouds.is_array()) throw ModelError(path + "clouds: not an array");
        for (std::size_t k = 0; k < jclouds.size(); ++k) {
            const std::string cpath = path + "clouds[" + std::to_string(k) + "].";
            const auto& jk = jclouds[k];
            DataCloud cloud;
            cloud.id = json_int(jk, cpath, "id");
            cloud.class_label = cm.class_label;
            cloud.center = json_vector(jk, cpath, "center");
            cloud.support = json_int(jk, cpath, "support");
            cloud.mean_sq_norm = json_double(jk, cpath, "mean_sq_norm");
            cloud.variance = json_double(jk, cpath, "variance");
            const auto& sid = json_field(jk, cpath, "source_sample_id");
            if (sid.is_null()) {
                cloud.source_sample_id = std::nullopt;
            } else if (sid.is_number_integer()) {
                cloud.source_sample_id = sid.get<std::int64_t>();
            } else {
                throw ModelError(cpath + "source_sample_id: not an integer or null");
            }
            cloud.synthetic = json_bool(jk, cpath, "synthetic");
            cm.clouds.push_back(std::move(cloud));
        }
        m.classes.push_back(std::move(cm));
    }

    const auto& megaclouds = json_field(j, "", "megaclouds");
    if (!megaclouds.is_array()) throw ModelError("megaclouds: not an array");
    for (std::size_t g = 0; g < megaclouds.size(); ++g) {
        const std::string path = "megaclouds[" + std::to_string(g) + "].";
        const auto& jg = megaclouds[g];
        MegaCloud mc;
        mc.id = json_int(jg, path, "id");
        mc.class_label = json_string(jg, path, "class_label");
        mc.member_cloud_ids = json_id_list(jg, path, "member_cloud_ids");
        m.megaclouds.push_back(std::move(mc));
    }

    const auto& ranking = json_field(j, "", "ranking");
    m.ranking.order = json_id_list(ranking, "ranking.", "order");
    const auto& errors = json_field(ranking, "ranking.", "per_cloud_error");
    if (!errors.is_array()) throw ModelError("ranking.per_cloud_error: not an array");
    for (const auto& e : errors) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
            throw ModelError("ranking.per_cloud_error: entries must be [cloud id, error] pairs");
        }
        m.ranking.per_cloud_error[e[0].get<std::int64_t>()] = e[1].get<double>();
    }

    const auto& prov = json_field(j, "", "provenance");
    const auto& seed = json_field(prov, "provenance.", "seed");
    if (!seed.is_number_integer() && !seed.is_number_unsigned()) {
        throw ModelError("provenance.seed: not an integer");
    }
    m.provenance.seed = seed.get<std::uint64_t>();
    m.provenance.balance = json_bool(prov, "provenance.", "balance");
    m.provenance.balance_cap = json_int(prov, "provenance.", "balance_cap");

    validate_model(m);
    return m;
}

inline DmrModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError("model parse error in " + path + ": " + e.what());
    }
    return model_from_json(j);
}

/// Atomic write: the file appears complete or not at all.
inline void save_model(const DmrModel& m, const std::string& path) {
    const std::string body = model_to_json_string(m);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ModelError("cannot write model file: " + tmp);
        out << body;
        if (!out) throw ModelError("cannot write model file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw ModelError("cannot move model file into place: " + path);
    }
}

}  // namespace dmr
