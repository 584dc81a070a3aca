#include "sift/rca.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "sift/json_io.hpp"

namespace sift::rca {

const clustering::ClusterModel* VersionSnapshot::model(const std::string& component) const {
    for (const auto& m : models) {
        if (m.component == component) return &m;
    }
    return nullptr;
}

void VersionSnapshot::validate() const {
    for (const auto& m : models) {
        const auto it = catalog.find(m.component);
        for (const auto& c : m.clusters) {
            for (const auto& name : c.members) {
                if (it == catalog.end() || !it->second.contains(name)) {
                    throw Error("snapshot " + label + ": cluster member " + m.component + "/" + name +
                                " is not in the catalog");
                }
            }
        }
    }
}

VersionSnapshot make_snapshot(std::string label, const preprocess::PreparedCatalog& prepared,
                              std::vector<clustering::ClusterModel> models, DependencyGraph depgraph) {
    VersionSnapshot s;
    s.label = std::move(label);
    s.catalog = prepared.all_metric_names();
    s.models = std::move(models);
    s.depgraph = std::move(depgraph);
    s.validate();
    return s;
}

VersionSnapshot load_snapshot(const std::filesystem::path& dir, std::string label) {
    const auto prepared = read_json(dir / "prepared.json").get<preprocess::PreparedCatalog>();
    auto models = read_json(dir / "clusters.json").get<std::vector<clustering::ClusterModel>>();
    auto graph = read_json(dir / "depgraph.json").get<DependencyGraph>();
    return make_snapshot(std::move(label), prepared, std::move(models), std::move(graph));
}

void RcaConfig::validate() const {
    if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
        throw Error("rca: similarity_threshold must be in [0, 1]");
    }
    if (novelty_threshold < 0) throw Error("rca: novelty_threshold must be >= 0");
}

std::map<std::string, ComponentDiff> metric_diff(const VersionSnapshot& c, const VersionSnapshot& f) {
    std::map<std::string, ComponentDiff> out;
    static const std::set<std::string> none;
    auto names = [](const VersionSnapshot& s, const std::string& comp) -> const std::set<std::string>& {
        const auto it = s.catalog.find(comp);
        return it == s.catalog.end() ? none : it->second;
    };
    std::set<std::string> components;
    for (const auto& [comp, _] : c.catalog) components.insert(comp);
    for (const auto& [comp, _] : f.catalog) components.insert(comp);
    for (const auto& comp : components) {
        const auto& mc = names(c, comp);
        const auto& mf = names(f, comp);
        auto& d = out[comp];
        std::set_difference(mf.begin(), mf.end(), mc.begin(), mc.end(), std::inserter(d.added, d.added.end()));
        std::set_difference(mc.begin(), mc.end(), mf.begin(), mf.end(),
                            std::inserter(d.discarded, d.discarded.end()));
    }
    return out;
}

NoveltyScore make_novelty(int new_count, int discarded_count) {
    return {new_count, discarded_count, new_count + discarded_count};
}

std::vector<RankedComponent> rank_novelty(const std::map<std::string, NoveltyScore>& scores) {
    std::vector<RankedComponent> out;
    for (const auto& [comp, s] : scores) out.push_back({comp, s});
    std::stable_sort(out.begin(), out.end(), [](const RankedComponent& a, const RankedComponent& b) {
        if (a.novelty.total != b.novelty.total) return a.novelty.total > b.novelty.total;
        if (a.novelty.new_count != b.novelty.new_count) return a.novelty.new_count > b.novelty.new_count;
        return a.component < b.component;
    });
    return out;
}

std::vector<RankedComponent> rank_novelty(const std::map<std::string, ComponentDiff>& diff) {
    std::map<std::string, NoveltyScore> scores;
    for (const auto& [comp, d] : diff) {
        scores[comp] = make_novelty(static_cast<int>(d.added.size()), static_cast<int>(d.discarded.size()));
    }
    return rank_novelty(scores);
}

double cluster_similarity(const std::set<std::string>& mc, const std::set<std::string>& mf) {
    if (mc.empty()) throw Error("cluster_similarity: correct-version cluster is empty");
    std::size_t common = 0;
    for (const auto& m : mc) common += mf.contains(m) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(mc.size());
}

std::vector<ClusterMatch> match_clusters(const clustering::ClusterModel& c, const clustering::ClusterModel& f,
                                         const RcaConfig& cfg) {
    cfg.validate();
    if (c.component != f.component) throw Error("match_clusters: models belong to different components");
    std::vector<ClusterMatch> candidates;
    for (const auto& cc : c.clusters) {
        const std::set<std::string> mc(cc.members.begin(), cc.members.end());
        for (const auto& fc : f.clusters) {
            const std::set<std::string> mf(fc.members.begin(), fc.members.end());
            const double s = cluster_similarity(mc, mf);
            if (s >= cfg.similarity_threshold) candidates.push_back({cc.id, fc.id, s});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const ClusterMatch& a, const ClusterMatch& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return std::tie(a.c_cluster, a.f_cluster) < std::tie(b.c_cluster, b.f_cluster);
    });
    std::set<int> used_c;
    std::set<int> used_f;
    std::vector<ClusterMatch> out;
    for (const auto& m : candidates) {
        if (used_c.contains(m.c_cluster) || used_f.contains(m.f_cluster)) continue;
        used_c.insert(m.c_cluster);
        used_f.insert(m.f_cluster);
        out.push_back(m);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.c_cluster < b.c_cluster; });
    return out;
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::NovelClusterEdge: return "NOVEL_CLUSTER_EDGE";
        case EventKind::EdgeChurn: return "EDGE_CHURN";
        case EventKind::LagChange: return "LAG_CHANGE";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "NOVEL_CLUSTER_EDGE") return EventKind::NovelClusterEdge;
    if (s == "EDGE_CHURN") return EventKind::EdgeChurn;
    if (s == "LAG_CHANGE") return EventKind::LagChange;
    throw Error("unknown event kind: " + s);
}

Matching match_all(const VersionSnapshot& c, const VersionSnapshot& f, const RcaConfig& cfg) {
    Matching out;
    for (const auto& mc : c.models) {
        if (const auto* mf = f.model(mc.component)) out[mc.component] = match_clusters(mc, *mf, cfg);
    }
    return out;
}

namespace {

using ClusterRef = std::pair<std::string, int>;  // component, cluster id

ClusterRef cluster_ref(const VersionSnapshot& s, const std::string& comp, const std::string& metric) {
    const auto* m = s.model(comp);
    return {comp, m == nullptr ? -1 : m->cluster_of(metric)};
}

/// Novelty of each cluster: discarded members for C clusters, new members for F clusters.
std::map<ClusterRef, int> cluster_novelty(const VersionSnapshot& s, const std::map<std::string, ComponentDiff>& diff,
                                          bool correct_side) {
    std::map<ClusterRef, int> out;
    for (const auto& m : s.models) {
        const auto it = diff.find(m.component);
        for (const auto& c : m.clusters) {
            int n = 0;
            if (it != diff.end()) {
                const auto& changed = correct_side ? it->second.discarded : it->second.added;
                for (const auto& name : c.members) n += changed.contains(name) ? 1 : 0;
            }
            out[{m.component, c.id}] = n;
        }
    }
    return out;
}

using ClusterEdge = std::tuple<std::string, int, std::string, int>;

std::map<ClusterEdge, const DependencyEdge*> cluster_edges(const VersionSnapshot& s) {
    std::map<ClusterEdge, const DependencyEdge*> out;
    for (const auto& e : s.depgraph.edges) {
        const auto a = cluster_ref(s, e.src_component, e.src_metric);
        const auto b = cluster_ref(s, e.dst_component, e.dst_metric);
        if (a.second < 0 || b.second < 0) continue;
        out.emplace(ClusterEdge{a.first, a.second, b.first, b.second}, &e);
    }
    return out;
}

}  // namespace

std::vector<EdgeEvent> edge_filter(const VersionSnapshot& c, const VersionSnapshot& f, const Matching& mapping,
                                   const RcaConfig& cfg) {
    cfg.validate();
    const auto diff = metric_diff(c, f);
    const auto novelty_c = cluster_novelty(c, diff, true);
    const auto novelty_f = cluster_novelty(f, diff, false);

    std::map<ClusterRef, int> c_to_f;
    for (const auto& [comp, matches] : mapping) {
        for (const auto& m : matches) {
            if (m.similarity >= cfg.similarity_threshold) c_to_f[{comp, m.c_cluster}] = m.f_cluster;
        }
    }

    std::vector<EdgeEvent> events;
    auto novel = [&](const std::map<ClusterRef, int>& nov, const ClusterRef& r) {
        const auto it = nov.find(r);
        return it != nov.end() && it->second >= cfg.novelty_threshold;
    };
    auto novel_edges = [&](const VersionSnapshot& s, const std::map<ClusterRef, int>& nov) {
        for (const auto& e : s.depgraph.edges) {
            if (novel(nov, cluster_ref(s, e.src_component, e.src_metric)) ||
                novel(nov, cluster_ref(s, e.dst_component, e.dst_metric))) {
                events.push_back({EventKind::NovelClusterEdge, s.label, e, 0});
            }
        }
    };
    novel_edges(c, novelty_c);
    novel_edges(f, novelty_f);

    const auto edges_c = cluster_edges(c);
    const auto edges_f = cluster_edges(f);
    std::set<ClusterEdge> f_seen;
    for (const auto& [ce, edge] : edges_c) {
        const auto& [ca, ia, cb, ib] = ce;
        const auto fa = c_to_f.find({ca, ia});
        const auto fb = c_to_f.find({cb, ib});
        if (fa == c_to_f.end() || fb == c_to_f.end()) continue;
        const ClusterEdge fe{ca, fa->second, cb, fb->second};
        const auto it = edges_f.find(fe);
        if (it == edges_f.end()) {
            events.push_back({EventKind::EdgeChurn, c.label, *edge, 0});
        } else {
            f_seen.insert(fe);
            if (it->second->lag_ms != edge->lag_ms) {
                events.push_back({EventKind::LagChange, c.label + "," + f.label, *edge, it->second->lag_ms});
            }
        }
    }
    std::map<ClusterRef, int> f_matched;
    for (const auto& [ref, fid] : c_to_f) f_matched[{ref.first, fid}] = ref.second;
    for (const auto& [fe, edge] : edges_f) {
        if (f_seen.contains(fe)) continue;
        const auto& [ca, ia, cb, ib] = fe;
        if (f_matched.contains({ca, ia}) && f_matched.contains({cb, ib})) {
            events.push_back({EventKind::EdgeChurn, f.label, *edge, 0});
        }
    }

    std::sort(events.begin(), events.end(), [](const EdgeEvent& a, const EdgeEvent& b) { return a.key() < b.key(); });
    events.erase(std::unique(events.begin(), events.end(),
                             [](const EdgeEvent& a, const EdgeEvent& b) { return a.key() == b.key(); }),
                 events.end());
    return events;
}

std::size_t RcaReport::metric_count() const {
    std::size_t n = 0;
    for (const auto& e : ranked) n += e.metric_list.size();
    return n;
}

RcaReport rca_report(const VersionSnapshot& c, const VersionSnapshot& f, const RcaConfig& cfg) {
    cfg.validate();
    const auto diff = metric_diff(c, f);
    const auto ranking = rank_novelty(diff);
    const auto mapping = match_all(c, f, cfg);
    const auto events = edge_filter(c, f, mapping, cfg);
    const auto novelty_c = cluster_novelty(c, diff, true);
    const auto novelty_f = cluster_novelty(f, diff, false);

    std::map<std::string, std::set<std::string>> metrics;
    auto add_cluster = [&](const VersionSnapshot& s, const ClusterRef& r) {
        const auto* m = s.model(r.first);
        const auto* cl = m == nullptr ? nullptr : m->find_cluster(r.second);
        if (cl == nullptr) return;
        metrics[r.first].insert(cl->members.begin(), cl->members.end());
    };
    for (const auto& [r, n] : novelty_c) {
        if (n >= cfg.novelty_threshold) add_cluster(c, r);
    }
    for (const auto& [r, n] : novelty_f) {
        if (n >= cfg.novelty_threshold) add_cluster(f, r);
    }

    std::map<std::string, std::vector<EdgeEvent>> evidence;
    for (const auto& ev : events) {
        const bool in_c = ev.version.find(c.label) != std::string::npos;
        const bool in_f = ev.version.find(f.label) != std::string::npos;
        for (const auto& [comp, metric] : {std::pair{ev.edge.src_component, ev.edge.src_metric},
                                           std::pair{ev.edge.dst_component, ev.edge.dst_metric}}) {
            if (in_c) add_cluster(c, cluster_ref(c, comp, metric));
            if (in_f) add_cluster(f, cluster_ref(f, comp, metric));
            metrics[comp].insert(metric);
        }
        evidence[ev.edge.src_component].push_back(ev);
        if (ev.edge.dst_component != ev.edge.src_component) evidence[ev.edge.dst_component].push_back(ev);
    }

    RcaReport report;
    int rank = 0;
    for (const auto& rc : ranking) {
        const auto mit = metrics.find(rc.component);
        const bool has_metrics = mit != metrics.end() && !mit->second.empty();
        if (!has_metrics && rc.novelty.total == 0) continue;
        ReportEntry e;
        e.component = rc.component;
        e.rank = ++rank;
        e.novelty = rc.novelty;
        if (has_metrics) e.metric_list.assign(mit->second.begin(), mit->second.end());
        if (const auto eit = evidence.find(rc.component); eit != evidence.end()) e.evidence = eit->second;
        report.ranked.push_back(std::move(e));
    }
    return report;
}

std::string format_table(const RcaReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "rank" << std::setw(28) << "component" << std::setw(12) << "novelty"
       << std::setw(10) << "#metrics" << "events\n";
    for (const auto& e : report.ranked) {
        std::set<std::string> kinds;
        for (const auto& ev : e.evidence) kinds.insert(to_string(ev.kind));
        std::string joined;
        for (const auto& k : kinds) joined += (joined.empty() ? "" : ",") + k;
        os << std::left << std::setw(6) << e.rank << std::setw(28) << e.component << std::setw(12)
           << (std::to_string(e.novelty.total) + " (" + std::to_string(e.novelty.new_count) + "/" +
               std::to_string(e.novelty.discarded_count) + ")")
           << std::setw(10) << e.metric_list.size() << (joined.empty() ? "-" : joined) << "\n";
    }
    return os.str();
}

}  // namespace sift::rca
