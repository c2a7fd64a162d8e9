#include "picrr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "picrr/error.hpp"
#include "picrr/pipeline.hpp"

namespace fs = std::filesystem;

namespace picrr {

GroundTruth GroundTruth::from_points(std::vector<std::pair<double, double>> points)
{
    if (points.empty()) throw Error("ground truth is empty");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first)) throw Error("ground truth times must increase");
    }
    GroundTruth g;
    g.points_ = std::move(points);
    return g;
}

GroundTruth GroundTruth::load(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open ground truth " + path.string());
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,rr_bpm") throw Error("ground truth header must be 't,rr_bpm': " + path.string());
    std::vector<std::pair<double, double>> pts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument(line);
            pts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw Error("malformed ground truth row at line " + std::to_string(lineno) + " of " + path.string());
        }
    }
    return from_points(std::move(pts));
}

double GroundTruth::at(double t) const
{
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    if (it == points_.begin()) throw Error("ground truth does not cover t=" + std::to_string(t));
    return std::prev(it)->second;
}

Score score(std::span<const RRPrediction> predictions, const GroundTruth& truth)
{
    Score s;
    double abs_sum = 0.0;
    int hits = 0;
    int n = 0;
    for (const auto& p : predictions) {
        if (!p.valid || !p.rr_bpm) {
            ++s.invalid_count;
            continue;
        }
        const double err = std::abs(*p.rr_bpm - truth.at(p.t));
        abs_sum += err;
        if (err <= kSuccessBoundBpm) ++hits;
        ++n;
    }
    if (n > 0) s.metrics = EvalMetrics{abs_sum / n, 100.0 * hits / n, n, s.invalid_count};
    return s;
}

double group_rank_stats(std::span<const int> winners)
{
    if (winners.empty()) throw Error("group rank statistics need at least one valid window");
    const auto broader = std::count_if(winners.begin(), winners.end(), [](int g) { return g >= 2; });
    return static_cast<double>(broader) / static_cast<double>(winners.size());
}

std::optional<double> group_rank_stats(std::span<const RRPrediction> predictions)
{
    std::vector<int> winners;
    for (const auto& p : predictions) {
        if (p.valid && p.group_index) winners.push_back(*p.group_index);
    }
    if (winners.empty()) return std::nullopt;
    return group_rank_stats(winners);
}

std::vector<Recording> load_dataset_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed dataset manifest: " + std::string(e.what()));
    }
    if (!j.is_array()) throw Error("dataset manifest must be a JSON list");
    if (j.empty()) throw Error("dataset manifest is empty");
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    std::vector<Recording> out;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("video_path") || !item.contains("ground_truth_path")) {
            throw Error("each manifest entry needs video_path and ground_truth_path");
        }
        Recording r;
        r.video = resolve(item["video_path"].get<std::string>());
        r.ground_truth = resolve(item["ground_truth_path"].get<std::string>());
        if (item.contains("landmarks_path")) r.landmarks = resolve(item["landmarks_path"].get<std::string>());
        if (item.contains("fixed_roi")) {
            const auto& a = item["fixed_roi"];
            if (!a.is_array() || a.size() != 4) throw Error("fixed_roi must be [x, y, w, h]");
            r.fixed_roi = RoiRect{a[0].get<int>(), a[1].get<int>(), a[2].get<int>(), a[3].get<int>()};
        }
        if (!r.landmarks && !r.fixed_roi) throw Error("manifest entry needs landmarks_path or fixed_roi");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AblationCell> default_ablation_cells()
{
    return {{ProfileMode::FullRoi, 0.05}, {ProfileMode::FullRoi, 0.30}, {ProfileMode::Edges, 0.05},
            {ProfileMode::Edges, 0.30}};
}

AblationCell parse_ablation_cell(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error("cell must look like 'edges,0.30'");
    AblationCell c;
    c.mode = parse_profile_mode(text.substr(0, comma));
    try {
        c.fraction = std::stod(text.substr(comma + 1));
    } catch (const std::logic_error&) {
        throw Error("bad cell fraction in '" + text + "'");
    }
    return c;
}

RunConfig cell_config(const RunConfig& base, const AblationCell& cell)
{
    RunConfig cfg = base;
    cfg.profile_mode = cell.mode;
    cfg.breathing.top_frac = cell.fraction;
    cfg.breathing.group_frac = std::min(base.breathing.group_frac, cell.fraction);
    return cfg;
}

AblationResult ablation(std::span<const Recording> recordings, const RunConfig& base,
                        std::span<const AblationCell> cells)
{
    if (recordings.empty()) throw Error("no recordings to evaluate");
    AblationResult result;
    std::vector<AblationRow> rows(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) rows[c].cell = cells[c];

    // Scores are pooled over recordings: each cell keeps every valid absolute error.
    std::vector<std::vector<double>> errors(cells.size());
    std::vector<int> invalid(cells.size(), 0);

    for (const auto& rec : recordings) {
        try {
            const GroundTruth truth = GroundTruth::load(rec.ground_truth);
            auto source = open_source(rec.video);
            RoiSource roi = rec.fixed_roi ? RoiSource{*rec.fixed_roi} : RoiSource{LandmarkTrack::load(*rec.landmarks)};
            std::vector<Pipeline> pipelines;
            pipelines.reserve(cells.size());
            for (const auto& cell : cells) pipelines.emplace_back(cell_config(base, cell), source->meta(), roi);
            std::vector<std::vector<RRPrediction>> preds(cells.size());
            while (auto frame = source->next()) {
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    if (auto a = pipelines[c].push_frame(*frame)) preds[c].push_back(a->prediction);
                }
            }
            std::vector<std::vector<double>> rec_errors(cells.size());
            std::vector<int> rec_invalid(cells.size(), 0);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                for (const auto& p : preds[c]) {
                    if (p.valid && p.rr_bpm) rec_errors[c].push_back(std::abs(*p.rr_bpm - truth.at(p.t)));
                    else ++rec_invalid[c];
                }
            }
            for (std::size_t c = 0; c < cells.size(); ++c) {
                errors[c].insert(errors[c].end(), rec_errors[c].begin(), rec_errors[c].end());
                invalid[c] += rec_invalid[c];
                rows[c].predictions.insert(rows[c].predictions.end(), preds[c].begin(), preds[c].end());
            }
        } catch (const std::exception& e) {
            result.errors.push_back(rec.video.string() + ": " + e.what());
            for (auto& r : rows) ++r.failed_recordings;
        }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& r = rows[c];
        r.score.invalid_count = invalid[c];
        if (!errors[c].empty()) {
            const auto n = static_cast<int>(errors[c].size());
            double sum = 0.0;
            int hits = 0;
            for (double e : errors[c]) {
                sum += e;
                if (e <= kSuccessBoundBpm) ++hits;
            }
            r.score.metrics = EvalMetrics{sum / n, 100.0 * hits / n, n, invalid[c]};
        }
        r.group_gt1_share = group_rank_stats(r.predictions);
    }
    result.rows = std::move(rows);
    return result;
}

std::string format_ablation_csv(const std::string& dataset, const AblationResult& result)
{
    std::ostringstream out;
    out << "# dataset=" << dataset << "\n";
    out << "# sr2 counts |pred - ref| <= 2.0 BPM as a success (inclusive bound)\n";
    out << "profile,fraction,mae,sr2,n_valid,n_invalid,group_gt1_share,status\n";
    char buf[64];
    for (const auto& r : result.rows) {
        out << to_string(r.cell.mode) << ',';
        std::snprintf(buf, sizeof buf, "%.2f", r.cell.fraction);
        out << buf << ',';
        if (r.score.metrics) {
            std::snprintf(buf, sizeof buf, "%.3f,%.1f,%d", r.score.metrics->mae, r.score.metrics->sr2, r.score.metrics->n);
            out << buf;
        } else {
            out << ",,0";
        }
        out << ',' << r.score.invalid_count << ',';
        if (r.group_gt1_share) {
            std::snprintf(buf, sizeof buf, "%.3f", *r.group_gt1_share);
            out << buf;
        }
        out << ',' << (r.failed() ? "failed" : "ok") << '\n';
    }
    return out.str();
}

}  // namespace picrr
