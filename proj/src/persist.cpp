#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "gaze/harness.hpp"
#include "json.hpp"

namespace gaze {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        require(used == tok.size(), ErrorKind::data, "malformed " + what + ": " + tok);
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorKind::data, "malformed " + what + ": " + tok);
    }
}

std::string sanitize_name(const std::string& name) {
    std::string out = name.empty() ? std::string("unknown") : name;
    for (char& c : out)
        if (c == ' ' || c == '\t' || c == '\n') c = '_';
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::data, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::data, "cannot write " + path);
    out << text;
    require(out.good(), ErrorKind::data, "write failed for " + path);
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Trace format

std::string trace_to_string(const SessionTrace& trace) {
    trace.validate();
    std::ostringstream out;
    out << "#gazetrace v1 sensor=" << sanitize_name(trace.meta.sensor)
        << " persona=" << sanitize_name(trace.meta.persona) << " seed=" << trace.meta.seed
        << " fps=" << g17(trace.meta.fps) << '\n';
    std::size_t probe_idx = 0;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const HeadPoseSample& s = trace.samples[i];
        int probe = 0;
        while (probe_idx < trace.probes_ms.size() && trace.probes_ms[probe_idx] == s.t_ms) {
            probe = 1;
            ++probe_idx;
        }
        out << g17(s.t_ms) << ' ' << g17(s.yaw_deg) << ' ' << g17(s.pitch_deg) << ' '
            << g17(s.roll_deg) << ' ' << g17(s.face_cx_px) << ' ' << g17(s.face_cy_px) << ' '
            << g17(s.face_area_px2) << ' ';
        if (trace.has_labels() && trace.labels[i].has_value())
            out << trace.labels[i]->id();
        else
            out << '-';
        out << ' ' << probe << '\n';
    }
    require(probe_idx == trace.probes_ms.size(), ErrorKind::data,
            "probe timestamps must coincide with sample timestamps");
    return out.str();
}

SessionTrace trace_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::data, "empty trace file");
    std::istringstream header(line);
    std::string magic;
    header >> magic;
    require(magic == "#gazetrace", ErrorKind::data, "not a gaze trace file");
    std::string version;
    header >> version;
    require(version == "v1", ErrorKind::data, "unsupported trace version: " + version);

    SessionTrace trace;
    std::string kv;
    while (header >> kv) {
        const std::size_t eq = kv.find('=');
        require(eq != std::string::npos, ErrorKind::data, "malformed header field: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "sensor") trace.meta.sensor = value;
        else if (key == "persona") trace.meta.persona = value;
        else if (key == "seed") {
            try {
                trace.meta.seed = std::stoull(value);
            } catch (...) {
                throw Error(ErrorKind::data, "malformed seed: " + value);
            }
        }
        else if (key == "fps") trace.meta.fps = parse_double(value, "fps");
        else throw Error(ErrorKind::data, "unknown header field: " + key);
    }

    std::size_t line_no = 1;
    bool any_label = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream rec(line);
        std::string tok[9];
        for (int f = 0; f < 9; ++f)
            require(static_cast<bool>(rec >> tok[f]), ErrorKind::data,
                    "line " + std::to_string(line_no) + ": expected 9 fields");
        std::string extra;
        require(!(rec >> extra), ErrorKind::data,
                "line " + std::to_string(line_no) + ": trailing fields");
        HeadPoseSample s;
        s.t_ms = parse_double(tok[0], "t_ms");
        s.yaw_deg = parse_double(tok[1], "yaw");
        s.pitch_deg = parse_double(tok[2], "pitch");
        s.roll_deg = parse_double(tok[3], "roll");
        s.face_cx_px = parse_double(tok[4], "face_cx");
        s.face_cy_px = parse_double(tok[5], "face_cy");
        s.face_area_px2 = parse_double(tok[6], "face_area");
        if (!trace.samples.empty())
            require(s.t_ms > trace.samples.back().t_ms, ErrorKind::data,
                    "line " + std::to_string(line_no) + ": timestamps out of order");
        if (tok[7] == "-") {
            trace.labels.push_back(std::nullopt);
        } else {
            const double id = parse_double(tok[7], "label");
            trace.labels.push_back(Region(static_cast<int>(id)));
            any_label = true;
        }
        require(tok[8] == "0" || tok[8] == "1", ErrorKind::data,
                "line " + std::to_string(line_no) + ": probe flag must be 0 or 1");
        if (tok[8] == "1") trace.probes_ms.push_back(s.t_ms);
        trace.samples.push_back(s);
    }
    if (!any_label) trace.labels.clear();
    trace.validate();
    return trace;
}

void write_trace(const SessionTrace& trace, const std::string& path) {
    write_file(path, trace_to_string(trace));
}

SessionTrace read_trace(const std::string& path) { return trace_from_string(read_file(path)); }

// ---------------------------------------------------------------------------
// Profile format

namespace {

void emit_values(std::ostringstream& out, const char* key, const double* v, std::size_t n) {
    out << key;
    for (std::size_t i = 0; i < n; ++i) out << ' ' << g17(v[i]);
    out << '\n';
}

struct LineReader {
    std::istringstream in;
    explicit LineReader(const std::string& body) : in(body) {}

    std::istringstream expect(const std::string& key) {
        std::string line;
        require(static_cast<bool>(std::getline(in, line)), ErrorKind::data,
                "profile truncated, expected '" + key + "'");
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        require(head == key, ErrorKind::data,
                "malformed profile: expected '" + key + "', got '" + head + "'");
        return ls;
    }
};

void read_values(std::istringstream& ls, double* v, std::size_t n, const std::string& what) {
    for (std::size_t i = 0; i < n; ++i) {
        std::string tok;
        require(static_cast<bool>(ls >> tok), ErrorKind::data, "profile field too short: " + what);
        v[i] = parse_double(tok, what);
    }
}

}  // namespace

std::string profile_to_string(const CalibrationProfile& profile) {
    std::ostringstream body;
    const int method = profile_method(profile);
    if (const auto* m1 = std::get_if<Method1Profile>(&profile)) {
        const double offsets[2] = {m1->dx00_cm, m1->dy00_cm};
        const double scales[4] = {m1->sx_pos, m1->sx_neg, m1->sy_pos, m1->sy_neg};
        emit_values(body, "offsets", offsets, 2);
        emit_values(body, "scales", scales, 4);
    } else if (const auto* m2 = std::get_if<Method2Profile>(&profile)) {
        const double offsets[2] = {m2->dx00_cm, m2->dy00_cm};
        emit_values(body, "offsets", offsets, 2);
        emit_values(body, "border_dx", m2->border_dx.data(), m2->border_dx.size());
        emit_values(body, "border_dy", m2->border_dy.data(), m2->border_dy.size());
    } else {
        const auto& learned = std::get<LearnedProfile>(profile);
        emit_values(body, "normalizer_mean", learned.normalizer.mean.data(), 5);
        emit_values(body, "normalizer_scale", learned.normalizer.scale.data(), 5);
        body << "normalizer_zero";
        for (bool z : learned.normalizer.zero_variance) body << ' ' << (z ? 1 : 0);
        body << '\n';
        const double ref[2] = {learned.reference_face_cx, learned.reference_face_cy};
        emit_values(body, "reference", ref, 2);
        body << "subset " << learned.feature_subset.size();
        for (int f : learned.feature_subset) body << ' ' << f;
        body << '\n';
        body << "standardized " << (learned.standardized ? 1 : 0) << '\n';
        if (const auto* mlp = std::get_if<MlpModel>(&learned.model)) {
            body << "model mlp\n";
            const double act[2] = {mlp->alpha, mlp->beta};
            emit_values(body, "activation", act, 2);
            for (int r = 0; r < kRegionCount; ++r) {
                const MlpNetwork& net = mlp->nets[static_cast<std::size_t>(r)];
                const std::string p = "net" + std::to_string(r + 1);
                emit_values(body, (p + "_w1").c_str(), net.w1.data(), net.w1.size());
                emit_values(body, (p + "_b1").c_str(), net.b1.data(), net.b1.size());
                emit_values(body, (p + "_w2").c_str(), net.w2.data(), net.w2.size());
                emit_values(body, (p + "_b2").c_str(), &net.b2, 1);
            }
        } else {
            const auto& svm = std::get<SvmModel>(learned.model);
            body << "model svm\n";
            body << "pairs " << svm.pairs.size() << '\n';
            for (const SvmBinary& bin : svm.pairs) {
                body << "pair " << bin.lo << ' ' << bin.hi << ' ' << (bin.converged ? 1 : 0)
                     << ' ' << g17(bin.b);
                for (double w : bin.w) body << ' ' << g17(w);
                body << ' ' << bin.alpha.size();
                for (double a : bin.alpha) body << ' ' << g17(a);
                for (int idx : bin.sv_index) body << ' ' << idx;
                body << '\n';
            }
        }
    }
    std::ostringstream out;
    out << "#gazeprofile v1 method=" << method << '\n';
    out << body.str();
    out << "#checksum " << std::hex << fnv1a(body.str()) << '\n';
    return out.str();
}

CalibrationProfile profile_from_string(const std::string& text) {
    const std::size_t header_end = text.find('\n');
    require(header_end != std::string::npos, ErrorKind::data, "profile truncated");
    const std::string header = text.substr(0, header_end);
    std::istringstream hs(header);
    std::string magic, version, method_kv;
    hs >> magic >> version >> method_kv;
    require(magic == "#gazeprofile", ErrorKind::data, "not a gaze profile file");
    require(version == "v1", ErrorKind::data, "unsupported profile version: " + version);
    require(method_kv.rfind("method=", 0) == 0, ErrorKind::data, "missing profile method");
    int method = 0;
    try {
        method = std::stoi(method_kv.substr(7));
    } catch (...) {
        throw Error(ErrorKind::data, "malformed profile method: " + method_kv);
    }

    const std::size_t checksum_pos = text.rfind("#checksum ");
    require(checksum_pos != std::string::npos && checksum_pos > header_end, ErrorKind::data,
            "profile truncated: checksum line missing");
    const std::string body = text.substr(header_end + 1, checksum_pos - header_end - 1);
    std::istringstream cs(text.substr(checksum_pos + 10));
    std::uint64_t stored = 0;
    cs >> std::hex >> stored;
    require(stored == fnv1a(body), ErrorKind::data, "profile checksum mismatch");

    LineReader reader(body);
    if (method == 1) {
        Method1Profile p;
        double offsets[2], scales[4];
        auto ls = reader.expect("offsets");
        read_values(ls, offsets, 2, "offsets");
        ls = reader.expect("scales");
        read_values(ls, scales, 4, "scales");
        p.dx00_cm = offsets[0];
        p.dy00_cm = offsets[1];
        p.sx_pos = scales[0];
        p.sx_neg = scales[1];
        p.sy_pos = scales[2];
        p.sy_neg = scales[3];
        return p;
    }
    if (method == 2) {
        Method2Profile p;
        double offsets[2];
        auto ls = reader.expect("offsets");
        read_values(ls, offsets, 2, "offsets");
        p.dx00_cm = offsets[0];
        p.dy00_cm = offsets[1];
        ls = reader.expect("border_dx");
        read_values(ls, p.border_dx.data(), p.border_dx.size(), "border_dx");
        ls = reader.expect("border_dy");
        read_values(ls, p.border_dy.data(), p.border_dy.size(), "border_dy");
        return p;
    }
    require(method == 3 || method == 4, ErrorKind::data,
            "unknown profile method " + std::to_string(method));
    LearnedProfile p;
    auto ls = reader.expect("normalizer_mean");
    read_values(ls, p.normalizer.mean.data(), 5, "normalizer_mean");
    ls = reader.expect("normalizer_scale");
    read_values(ls, p.normalizer.scale.data(), 5, "normalizer_scale");
    ls = reader.expect("normalizer_zero");
    for (std::size_t i = 0; i < 5; ++i) {
        int z = 0;
        require(static_cast<bool>(ls >> z), ErrorKind::data, "normalizer_zero too short");
        p.normalizer.zero_variance[i] = z != 0;
    }
    double ref[2];
    ls = reader.expect("reference");
    read_values(ls, ref, 2, "reference");
    p.reference_face_cx = ref[0];
    p.reference_face_cy = ref[1];
    ls = reader.expect("subset");
    std::size_t subset_n = 0;
    require(static_cast<bool>(ls >> subset_n) && subset_n >= 1 && subset_n <= 5, ErrorKind::data,
            "malformed feature subset");
    p.feature_subset.clear();
    for (std::size_t i = 0; i < subset_n; ++i) {
        int f = -1;
        require(static_cast<bool>(ls >> f) && f >= 0 && f < kFeatureCount, ErrorKind::data,
                "malformed feature subset");
        p.feature_subset.push_back(f);
    }
    ls = reader.expect("standardized");
    int standardized = 1;
    require(static_cast<bool>(ls >> standardized), ErrorKind::data, "malformed standardized flag");
    p.standardized = standardized != 0;
    ls = reader.expect("model");
    std::string kind;
    ls >> kind;
    if (kind == "mlp") {
        require(method == 3, ErrorKind::data, "profile method/model mismatch");
        MlpModel model;
        double act[2];
        ls = reader.expect("activation");
        read_values(ls, act, 2, "activation");
        model.alpha = act[0];
        model.beta = act[1];
        for (int r = 0; r < kRegionCount; ++r) {
            MlpNetwork& net = model.nets[static_cast<std::size_t>(r)];
            const std::string prefix = "net" + std::to_string(r + 1);
            ls = reader.expect(prefix + "_w1");
            read_values(ls, net.w1.data(), net.w1.size(), "w1");
            ls = reader.expect(prefix + "_b1");
            read_values(ls, net.b1.data(), net.b1.size(), "b1");
            ls = reader.expect(prefix + "_w2");
            read_values(ls, net.w2.data(), net.w2.size(), "w2");
            ls = reader.expect(prefix + "_b2");
            read_values(ls, &net.b2, 1, "b2");
        }
        p.model = model;
    } else if (kind == "svm") {
        require(method == 4, ErrorKind::data, "profile method/model mismatch");
        SvmModel model;
        ls = reader.expect("pairs");
        std::size_t pair_n = 0;
        require(static_cast<bool>(ls >> pair_n), ErrorKind::data, "malformed pair count");
        for (std::size_t k = 0; k < pair_n; ++k) {
            ls = reader.expect("pair");
            SvmBinary bin;
            int conv = 1;
            std::string btok;
            require(static_cast<bool>(ls >> bin.lo >> bin.hi >> conv >> btok), ErrorKind::data,
                    "malformed pair record");
            bin.converged = conv != 0;
            bin.b = parse_double(btok, "pair bias");
            read_values(ls, bin.w.data(), bin.w.size(), "pair weights");
            std::size_t nsv = 0;
            require(static_cast<bool>(ls >> nsv), ErrorKind::data, "malformed pair record");
            bin.alpha.resize(nsv);
            bin.sv_index.resize(nsv);
            for (std::size_t i = 0; i < nsv; ++i) {
                std::string tok;
                require(static_cast<bool>(ls >> tok), ErrorKind::data, "pair record too short");
                bin.alpha[i] = parse_double(tok, "alpha");
            }
            for (std::size_t i = 0; i < nsv; ++i)
                require(static_cast<bool>(ls >> bin.sv_index[i]), ErrorKind::data,
                        "pair record too short");
            if (!bin.converged) model.converged = false;
            model.pairs.push_back(std::move(bin));
        }
        p.model = model;
    } else {
        throw Error(ErrorKind::data, "unknown model kind: " + kind);
    }
    return p;
}

void save_profile(const CalibrationProfile& profile, const std::string& path) {
    write_file(path, profile_to_string(profile));
}

CalibrationProfile load_profile(const std::string& path) {
    return profile_from_string(read_file(path));
}

// ---------------------------------------------------------------------------
// Report JSON

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json j;
    j["format"] = "gazereport-v1";
    j["method"] = report.method;
    j["sensor"] = report.sensor;
    j["persona"] = report.persona;
    j["seed"] = report.seed;
    j["probe_count"] = report.probe_count;
    j["overall_accuracy"] = report.overall_accuracy;
    nlohmann::ordered_json per;
    for (double v : report.per_region_accuracy)
        per.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(v));
    j["per_region_accuracy"] = per;
    nlohmann::ordered_json counts;
    for (const auto& row : report.confusion.counts) counts.push_back(row);
    j["confusion_counts"] = counts;
    j["stats"] = {
        {"yaw_mean", report.stats.yaw_mean},     {"yaw_std", report.stats.yaw_std},
        {"yaw_max", report.stats.yaw_max},       {"yaw_min", report.stats.yaw_min},
        {"yaw_rate", report.stats.yaw_rate},     {"pitch_mean", report.stats.pitch_mean},
        {"pitch_std", report.stats.pitch_std},   {"pitch_max", report.stats.pitch_max},
        {"pitch_min", report.stats.pitch_min},   {"pitch_rate", report.stats.pitch_rate},
    };
    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed report JSON: ") + e.what());
    }
    try {
        require(j.at("format") == "gazereport-v1", ErrorKind::data,
                "unsupported report format");
        EvaluationReport r;
        r.method = j.at("method").get<int>();
        r.sensor = j.at("sensor").get<std::string>();
        r.persona = j.at("persona").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.probe_count = j.at("probe_count").get<long long>();
        r.overall_accuracy = j.at("overall_accuracy").get<double>();
        const auto& per = j.at("per_region_accuracy");
        require(per.size() == kRegionCount, ErrorKind::data, "bad per-region array");
        for (int i = 0; i < kRegionCount; ++i)
            r.per_region_accuracy[static_cast<std::size_t>(i)] =
                per[static_cast<std::size_t>(i)].is_null()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : per[static_cast<std::size_t>(i)].get<double>();
        const auto& counts = j.at("confusion_counts");
        require(counts.size() == kRegionCount, ErrorKind::data, "bad confusion matrix");
        for (int rr = 0; rr < kRegionCount; ++rr) {
            require(counts[static_cast<std::size_t>(rr)].size() == kRegionCount, ErrorKind::data,
                    "bad confusion matrix row");
            for (int c = 0; c < kRegionCount; ++c)
                r.confusion.counts[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)] =
                    counts[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)]
                        .get<long long>();
        }
        const auto& st = j.at("stats");
        r.stats.yaw_mean = st.at("yaw_mean").get<double>();
        r.stats.yaw_std = st.at("yaw_std").get<double>();
        r.stats.yaw_max = st.at("yaw_max").get<double>();
        r.stats.yaw_min = st.at("yaw_min").get<double>();
        r.stats.yaw_rate = st.at("yaw_rate").get<double>();
        r.stats.pitch_mean = st.at("pitch_mean").get<double>();
        r.stats.pitch_std = st.at("pitch_std").get<double>();
        r.stats.pitch_max = st.at("pitch_max").get<double>();
        r.stats.pitch_min = st.at("pitch_min").get<double>();
        r.stats.pitch_rate = st.at("pitch_rate").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed report JSON: ") + e.what());
    }
}

}  // namespace gaze
