#include "regionkit/contiguity.hpp"
#include "regionkit/error.hpp"
#include "regionkit/skater.hpp"
#include "regionkit/synth.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace regionkit;

namespace {

std::vector<int> shuffled_labels(const std::vector<int>& labels, std::mt19937_64& rng) {
    const int k = *std::max_element(labels.begin(), labels.end());
    std::vector<int> map(static_cast<std::size_t>(k) + 1);
    std::iota(map.begin() + 1, map.end(), 1);
    std::shuffle(map.begin() + 1, map.end(), rng);
    std::vector<int> out;
    for (int l : labels) out.push_back(map[static_cast<std::size_t>(l)] + 100);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("planted blocks are contiguous rectangles covering the grid") {
    for (int w = 1; w <= 9; ++w)
        for (int h = 1; h <= 9; ++h)
            for (int k = 1; k <= std::min(8, w * h); ++k) {
                const auto labels = planted_blocks(w, h, k);
                REQUIRE(labels.size() == static_cast<std::size_t>(w * h));
                CHECK(*std::max_element(labels.begin(), labels.end()) == k);
                // Rook grid graph.
                std::vector<std::pair<std::size_t, std::size_t>> edges;
                for (int r = 0; r < h; ++r)
                    for (int c = 0; c < w; ++c) {
                        const auto i = static_cast<std::size_t>(r * w + c);
                        if (c + 1 < w) edges.emplace_back(i, i + 1);
                        if (r + 1 < h) edges.emplace_back(i, i + static_cast<std::size_t>(w));
                    }
                CHECK(groups_are_connected(fixtures::graph(labels.size(), edges), labels));
                CHECK(labels[0] == 1);
            }
}

TEST_CASE("generate is deterministic per seed") {
    PlantedScenario s;
    s.seed = 42;
    const auto a = generate(s);
    const auto b = generate(s);
    CHECK(counts_csv(a.table) == counts_csv(b.table));
    CHECK(cells_geojson(a.cells) == cells_geojson(b.cells));
    CHECK(a.truth == b.truth);
    s.seed = 43;
    CHECK(counts_csv(generate(s).table) != counts_csv(a.table));
}

TEST_CASE("generated tables are well formed") {
    PlantedScenario s;
    s.background_games = 2;
    const auto d = generate(s);
    CHECK(d.cells.size() == 144);
    CHECK(d.table.n_regions() == 144);
    CHECK(d.table.games.size() == 17);
    CHECK_NOTHROW(d.table.validate());
    for (std::size_t r = 0; r < d.table.n_regions(); ++r) {
        long long sum = 0;
        for (std::size_t g = 0; g < d.table.games.size(); ++g) sum += d.table.count(r, g);
        CHECK(sum == d.table.totals[r]);
        CHECK(d.table.totals[r] > 0);
    }
    // Round trip through the file renderings.
    const auto t = parse_counts(counts_csv(d.table));
    CHECK(t.totals == d.table.totals);
    CHECK(t.counts == d.table.counts);
    const auto layer = parse_geojson(cells_geojson(d.cells));
    CHECK(layer.regions.size() == 144);
    CHECK(rook_adjacency(layer.regions).edges().size() == 2 * 12 * 11);
}

TEST_CASE("full concentration with one signature game gives identical rows per group") {
    PlantedScenario s;
    s.signature_games_per_group = 1;
    s.concentration = 1.0;
    s.seed = 9;
    const auto d = generate(s);
    const auto fm = normalize(d.table, {});
    for (std::size_t i = 0; i < fm.rows(); ++i)
        for (std::size_t j = 0; j < fm.rows(); ++j)
            if (d.truth[i] == d.truth[j])
                for (std::size_t g = 0; g < fm.cols(); ++g) CHECK(fm(i, g) == fm(j, g));
}

TEST_CASE("full concentration keeps counts on own signatures") {
    PlantedScenario s;
    s.concentration = 1.0;
    s.background_games = 1;
    const auto d = generate(s);
    for (std::size_t r = 0; r < d.table.n_regions(); ++r)
        for (std::size_t g = 0; g < d.table.games.size(); ++g) {
            const bool own = d.table.games[g].rfind("g" + std::to_string(d.truth[r]) + "s", 0) == 0;
            if (!own) CHECK(d.table.count(r, g) == 0);
        }
}

TEST_CASE("invalid scenarios are rejected") {
    PlantedScenario s;
    s.k_true = 200;
    CHECK_THROWS_AS(generate(s), Error);
    s = {};
    s.concentration = 0.1;  // below the uniform share 3/15
    CHECK_THROWS_AS(generate(s), Error);
    s = {};
    s.concentration = 1.5;
    CHECK_THROWS_AS(generate(s), Error);
    s = {};
    s.base_total = 0;
    CHECK_THROWS_AS(generate(s), Error);
}

// Measures how far apart the planted groups sit in feature space compared with
// the spread inside each group.
TEST_CASE("planted groups are well separated across seeds") {
    double worst_ratio = 1e300;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        PlantedScenario s;
        s.seed = seed;
        const auto d = generate(s);
        const auto fm = normalize(d.table, {});
        const int k = s.k_true;
        std::vector<std::vector<double>> centroid(static_cast<std::size_t>(k), std::vector<double>(fm.cols(), 0.0));
        std::vector<double> size(static_cast<std::size_t>(k), 0.0);
        for (std::size_t i = 0; i < fm.rows(); ++i) {
            const auto c = static_cast<std::size_t>(d.truth[i] - 1);
            size[c] += 1;
            for (std::size_t g = 0; g < fm.cols(); ++g) centroid[c][g] += fm(i, g);
        }
        for (std::size_t c = 0; c < centroid.size(); ++c)
            for (auto& v : centroid[c]) v /= size[c];
        double within = 0.0;
        for (std::size_t i = 0; i < fm.rows(); ++i) {
            const auto c = static_cast<std::size_t>(d.truth[i] - 1);
            for (std::size_t g = 0; g < fm.cols(); ++g) {
                const double dv = fm(i, g) - centroid[c][g];
                within += dv * dv;
            }
        }
        const double within_sd = std::sqrt(within / static_cast<double>(fm.rows()));
        double min_between = 1e300;
        for (std::size_t a = 0; a < centroid.size(); ++a)
            for (std::size_t b = a + 1; b < centroid.size(); ++b) {
                double dd = 0.0;
                for (std::size_t g = 0; g < fm.cols(); ++g)
                    dd += (centroid[a][g] - centroid[b][g]) * (centroid[a][g] - centroid[b][g]);
                min_between = std::min(min_between, std::sqrt(dd));
            }
        worst_ratio = std::min(worst_ratio, min_between / within_sd);
    }
    MESSAGE("smallest centroid gap / within-group sd over 100 seeds: " << worst_ratio);
    CHECK(worst_ratio > 10.0);
}

TEST_CASE("adjusted rand index") {
    const std::vector<int> a{1, 1, 2, 2, 3, 3};
    CHECK(adjusted_rand_index(a, a) == 1.0);
    CHECK(adjusted_rand_index(a, {7, 7, 5, 5, 9, 9}) == 1.0);
    CHECK(adjusted_rand_index({1, 1, 1, 1}, {1, 2, 3, 4}) == 0.0);
    CHECK_THROWS_AS(adjusted_rand_index({1, 2}, {1}), Error);
    CHECK_THROWS_AS(adjusted_rand_index({1}, {1}), Error);
}

TEST_CASE("adjusted rand index matches pair counting and is symmetric") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 30;
        std::vector<int> a(n), b(n);
        const auto ka = 1 + rng() % 5, kb = 1 + rng() % 5;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 1 + static_cast<int>(rng() % ka);
            b[i] = 1 + static_cast<int>(rng() % kb);
        }
        const double ari = adjusted_rand_index(a, b);
        CHECK(std::abs(ari - oracle::adjusted_rand_pairs(a, b)) <= 1e-12);
        CHECK(ari == adjusted_rand_index(b, a));
        CHECK(std::abs(adjusted_rand_index(shuffled_labels(a, rng), shuffled_labels(b, rng)) - ari) <= 1e-12);
        CHECK(ari <= 1.0);
        CHECK(ari >= -1.0);
    }
}

TEST_CASE("label files round trip") {
    const auto text = labels_csv({"a", "b"}, {2, 1}, "group");
    CHECK(text == "region_id,group\na,2\nb,1\n");
    const auto back = parse_labels(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == std::pair<std::string, int>{"a", 2});
    CHECK_THROWS_AS(parse_labels("region_id,group\na,x\n"), Error);
    CHECK_THROWS_AS(parse_labels("region_id,group\na,1\na,2\n"), Error);
}

TEST_CASE("noiseless pipeline recovers the planted blocks") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 25; ++trial) {
        PlantedScenario s;
        s.width = 2 + static_cast<int>(rng() % 10);
        s.height = 2 + static_cast<int>(rng() % 10);
        s.k_true = 2 + static_cast<int>(rng() % static_cast<unsigned>(std::min(7, s.width * s.height - 1)));
        s.signature_games_per_group = 1 + static_cast<int>(rng() % 3);
        s.concentration = 1.0;
        s.seed = rng();
        const auto d = generate(s);
        const auto fm = normalize(d.table, {});
        const auto g = rook_adjacency(d.cells);
        const auto p = partition(g, fm, static_cast<std::size_t>(s.k_true));
        CHECK(adjusted_rand_index(d.truth, p.assignment) == 1.0);
    }
}

TEST_SUITE_END();
