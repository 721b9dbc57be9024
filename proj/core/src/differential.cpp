#include "oag/differential.hpp"

#include "oag/errors.hpp"

namespace oag {

std::optional<Disagreement> differential_check(const GroupSpec& g, const FormulaPtr& f, const Box& box,
                                               const QeOptions& opts) {
    auto qf = eliminate(g, f, opts);
    auto fv = free_vars(f);
    std::vector<std::string> names(fv.begin(), fv.end());
    std::size_t total = box_size(g, box, static_cast<int>(names.size()));
    if (total > box.cap) throw ResourceError("differential check needs " + std::to_string(total) + " assignments");
    auto pts = box_points(g, box);
    std::vector<std::size_t> idx(names.size(), 0);
    while (true) {
        GroupAssignment a;
        for (std::size_t i = 0; i < names.size(); ++i) a[names[i]] = pts[idx[i]];
        bool want = expand_bounded(g, f, a);
        bool got = scalar::evaluate(qf, scalar::scalarize(a));
        if (want != got) return Disagreement{f, a, want, got};
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == pts.size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    return std::nullopt;
}

std::string describe(const GroupAssignment& a) {
    std::string s;
    for (const auto& [k, v] : a) s += (s.empty() ? "" : " ") + k + "=" + v.str();
    return s;
}

}  // namespace oag
