#include <algorithm>
#include <array>
#include <bit>
#include <map>

#include "learners_internal.hpp"

namespace agml::detail {

KnnIndex build_knn_index(const KnnParams& p) {
    KnnIndex index;
    std::map<std::vector<double>, std::size_t> slot;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        auto [it, inserted] = slot.emplace(p.points[i], index.entries.size());
        if (inserted) {
            index.entries.push_back({p.points[i], 0, {}});
        }
        index.entries[it->second].occurrences.push_back(i);
    }
    index.packed = !p.points.empty() && p.points.front().size() <= 64 &&
                   std::all_of(p.points.begin(), p.points.end(), is_binary);
    if (index.packed)
        for (auto& e : index.entries) e.bits = pack_bits(e.point);
    return index;
}

Label knn_predict(const KnnParams& p, const KnnIndex& index, const std::vector<double>& x) {
    const std::size_t k = static_cast<std::size_t>(p.k);
    const bool packed = index.packed && is_binary(x);
    const std::uint64_t xb = packed ? pack_bits(x) : 0;

    std::vector<std::pair<double, std::size_t>> ranked;  // (distance, entry)
    ranked.reserve(index.entries.size());
    if (packed) {
        // Hamming distances are small integers: find the shell that covers k
        // points by counting, then keep only entries inside it.
        std::array<std::size_t, 65> shell{};
        std::vector<std::uint8_t> dist(index.entries.size());
        for (std::size_t e = 0; e < index.entries.size(); ++e) {
            dist[e] = static_cast<std::uint8_t>(std::popcount(index.entries[e].bits ^ xb));
            shell[dist[e]] += index.entries[e].occurrences.size();
        }
        std::size_t covered = 0, cutoff = 0;
        while (cutoff < 64 && (covered += shell[cutoff]) < k) ++cutoff;
        for (std::size_t e = 0; e < index.entries.size(); ++e)
            if (dist[e] <= cutoff) ranked.emplace_back(dist[e], e);
    } else {
        for (std::size_t e = 0; e < index.entries.size(); ++e)
            ranked.emplace_back(squared_distance(index.entries[e].point, x), e);
    }
    std::sort(ranked.begin(), ranked.end());

    // Take whole distance shells until k training points are covered, then
    // order those points by (distance, training index).
    std::vector<std::pair<double, std::size_t>> nearest;  // (distance, training index)
    std::size_t covered = 0;
    double cutoff = 0;
    for (const auto& [d, e] : ranked) {
        if (covered >= k && d > cutoff) break;
        for (auto i : index.entries[e].occurrences) nearest.emplace_back(d, i);
        covered += index.entries[e].occurrences.size();
        cutoff = d;
    }
    std::sort(nearest.begin(), nearest.end());
    if (nearest.size() > k) nearest.resize(k);

    int votes = 0;
    for (const auto& [d, i] : nearest) votes += p.labels[i] == Label::Positive ? 1 : -1;
    return votes > 0 ? Label::Positive : Label::Negative;
}

}  // namespace agml::detail
