#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/imaging/geometry.hpp"
#include "facebench/recon/unet.hpp"

using namespace facebench;
using recon::ForwardTrace;
using recon::ImagePair;
using recon::Tensor;
using recon::UNet;
using recon::UNetConfig;

namespace {

Tensor random_tensor(int c, int h, int w, Rng& rng) {
    Tensor t(c, h, w);
    for (double& v : t.v) v = rng.uniform();
    return t;
}

std::vector<double> snapshot_params(UNet& model) {
    std::vector<double> values;
    for (const recon::ParamRef& ref : model.param_refs())
        values.insert(values.end(), ref.data, ref.data + ref.size);
    return values;
}

// Smooth procedural content: a color gradient plus two soft discs, so the
// occluded band is predictable from its surroundings.
Image random_scene(Rng& rng, int size) {
    Image img(size, size);
    double gx[3], gy[3], g0[3];
    for (int c = 0; c < 3; ++c) {
        g0[c] = rng.uniform(0.2, 0.6);
        gx[c] = rng.uniform(-0.3, 0.3);
        gy[c] = rng.uniform(-0.3, 0.3);
    }
    struct Disc {
        double cx, cy, r, amp[3];
    };
    Disc discs[2];
    for (Disc& d : discs) {
        d.cx = rng.uniform(0.0, size);
        d.cy = rng.uniform(0.0, size);
        d.r = rng.uniform(size * 0.15, size * 0.35);
        for (int c = 0; c < 3; ++c) d.amp[c] = rng.uniform(-0.25, 0.25);
    }
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = g0[c] + gx[c] * x / size + gy[c] * y / size;
                for (const Disc& d : discs) {
                    const double dx = x - d.cx;
                    const double dy = y - d.cy;
                    v += d.amp[c] * std::exp(-(dx * dx + dy * dy) / (2.0 * d.r * d.r));
                }
                img.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
    return img;
}

// Fixed-position black rectangle across the middle of the frame.
Image occlude_band(const Image& img) {
    Image out = img;
    const int s = img.width();
    for (int y = s / 4; y < s / 2; ++y)
        for (int x = s / 5; x < s - s / 5; ++x) out.set(x, y, 0.0, 0.0, 0.0);
    return out;
}

std::vector<ImagePair> occlusion_task(int n, int size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ImagePair> pairs;
    pairs.reserve(n);
    for (int i = 0; i < n; ++i) {
        Image clean = random_scene(rng, size);
        pairs.push_back({occlude_band(clean), std::move(clean)});
    }
    return pairs;
}

std::filesystem::path temp_dir() {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "facebench_unet_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("model configuration is validated") {
    CHECK_THROWS_AS(recon::build_model({32, 0, 8}, 1), ConfigError);
    CHECK_THROWS_AS(recon::build_model({32, 2, 0}, 1), ConfigError);
    CHECK_THROWS_AS(recon::build_model({30, 2, 8}, 1), ConfigError); // 30 not divisible by 4
    CHECK_THROWS_AS(recon::build_model({0, 2, 8}, 1), ConfigError);
    CHECK_NOTHROW(recon::build_model({8, 2, 2}, 1));
}

TEST_CASE("output shape equals input shape for depths 2 through 4") {
    Rng rng(11);
    for (int depth = 2; depth <= 4; ++depth) {
        const int size = 16 * (1 << (depth - 2)); // smallest convenient multiple of 2^depth
        const UNet model = recon::build_model({size, depth, 2}, 5);
        const Tensor x = random_tensor(3, size, size, rng);
        const Tensor y = model.forward(x);
        CHECK(y.c == 3);
        CHECK(y.h == size);
        CHECK(y.w == size);
        for (double v : y.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("initialization is seed-deterministic") {
    UNet a = recon::build_model({16, 2, 4}, 2024);
    UNet b = recon::build_model({16, 2, 4}, 2024);
    UNet c = recon::build_model({16, 2, 4}, 2025);
    CHECK(snapshot_params(a) == snapshot_params(b));
    CHECK(snapshot_params(a) != snapshot_params(c));
    CHECK(a.trained_on.empty());
}

TEST_CASE("parameter count matches a hand count and the analytic formulas") {
    // depth 1, base 1: every block counted by hand.
    // encoder conv_a 3->1 (27+1), conv_d 1->1 (9+1), bottleneck 1->1 (9+1),
    // up 1->1 (9+1), post-merge conv 1->1 (9+1), head 1->3 1x1 (3+3).
    const UNetConfig tiny{2, 1, 1};
    CHECK(recon::additive_parameter_count(tiny) == 74);
    // Concatenation would feed the post-merge conv 2 channels: 18+1 instead
    // of 9+1.
    CHECK(recon::concat_parameter_count(tiny) == 83);

    for (int depth = 2; depth <= 4; ++depth) {
        const int size = 16 * (1 << (depth - 2));
        const UNetConfig cfg{size, depth, 4};
        UNet model = recon::build_model(cfg, 3);
        std::ptrdiff_t total = 0;
        for (const recon::ParamRef& ref : model.param_refs()) total += ref.size;
        CHECK(model.parameter_count() == total);
        CHECK(model.parameter_count() == recon::additive_parameter_count(cfg));
        CHECK(recon::additive_parameter_count(cfg) < recon::concat_parameter_count(cfg));
    }
}

TEST_CASE("skip connections add the encoder map into the decoder path") {
    Rng rng(21);
    UNet model = recon::build_model({16, 3, 2}, 7);
    const Tensor x = random_tensor(3, 16, 16, rng);
    ForwardTrace trace;
    model.forward(x, &trace);
    REQUIRE(trace.merged.size() == 3);
    for (std::size_t stage = 0; stage < trace.merged.size(); ++stage) {
        REQUIRE(trace.merged[stage].same_shape(trace.up_out[stage]));
        REQUIRE(trace.merged[stage].same_shape(trace.skip[stage]));
        for (std::size_t i = 0; i < trace.merged[stage].v.size(); ++i)
            CHECK(trace.merged[stage].v[i] ==
                  doctest::Approx(trace.up_out[stage].v[i] + trace.skip[stage].v[i])
                      .epsilon(1e-12));
    }

    // With the bottleneck and every upsampling stage silenced, the decoder
    // input at each resolution must be exactly the encoder skip map.
    for (recon::DecoderStage& stage : model.decoder) {
        stage.up.W.setZero();
        stage.up.b.setZero();
    }
    model.bottleneck.W.setZero();
    model.bottleneck.b.setZero();
    ForwardTrace silenced;
    model.forward(x, &silenced);
    for (std::size_t stage = 0; stage < silenced.merged.size(); ++stage) {
        for (double v : silenced.up_out[stage].v) CHECK(v == 0.0);
        CHECK(silenced.merged[stage].v == silenced.skip[stage].v);
    }
}

TEST_CASE("analytic gradients agree with finite differences") {
    Rng rng(31);
    UNet model = recon::build_model({4, 2, 2}, 13);
    const Tensor x = random_tensor(3, 4, 4, rng);
    const Tensor target = random_tensor(3, 4, 4, rng);
    const double inv_n = 1.0 / static_cast<double>(target.v.size());

    const auto loss_at = [&]() {
        const Tensor y = model.forward(x);
        double loss = 0.0;
        for (std::size_t i = 0; i < y.v.size(); ++i) {
            const double d = y.v[i] - target.v[i];
            loss += d * d;
        }
        return loss * inv_n;
    };

    ForwardTrace trace;
    const Tensor y = model.forward(x, &trace);
    Tensor d_out(y.c, y.h, y.w);
    for (std::size_t i = 0; i < y.v.size(); ++i)
        d_out.v[i] = 2.0 * (y.v[i] - target.v[i]) * inv_n;
    std::vector<Eigen::VectorXd> grads = model.zero_grads();
    model.backward(trace, d_out, grads);

    const double eps = 1e-5;
    double worst_rel = 0.0;
    const std::vector<recon::ParamRef> refs = model.param_refs();
    REQUIRE(refs.size() == grads.size());
    for (std::size_t r = 0; r < refs.size(); ++r) {
        REQUIRE(grads[r].size() == refs[r].size);
        for (std::ptrdiff_t i = 0; i < refs[r].size; ++i) {
            double& p = refs[r].data[i];
            const double saved = p;
            p = saved + eps;
            const double up = loss_at();
            p = saved - eps;
            const double down = loss_at();
            p = saved;
            const double fd = (up - down) / (2.0 * eps);
            const double an = grads[r][i];
            if (std::abs(an) < 1e-8) {
                CHECK(std::abs(fd) < 1e-6);
                continue;
            }
            worst_rel = std::max(worst_rel, std::abs(fd - an) / std::abs(an));
        }
    }
    CHECK(worst_rel < 1e-3);
}

TEST_CASE("mse helpers match hand-computed values") {
    const int size = 8;
    Image occluded(size, size, 0.25);
    Image clean(size, size, 0.75);
    const std::vector<ImagePair> pairs = {{occluded, clean}};
    CHECK(recon::identity_baseline_mse(pairs, size) == doctest::Approx(0.25).epsilon(1e-9));

    UNet model = recon::build_model({8, 1, 2}, 41);
    const double via_helper = recon::mse_loss(model, pairs.front());
    const Tensor out = model.forward(recon::tensor_from_image(occluded));
    const Tensor want = recon::tensor_from_image(clean);
    double manual = 0.0;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double d = out.v[i] - want.v[i];
        manual += d * d;
    }
    manual /= static_cast<double>(out.v.size());
    CHECK(via_helper == doctest::Approx(manual).epsilon(1e-12));
    CHECK(recon::mean_mse(model, pairs) == doctest::Approx(via_helper).epsilon(1e-12));
}

TEST_CASE("zero-epoch training changes nothing") {
    UNet model = recon::build_model({8, 1, 2}, 51);
    const std::vector<double> before = snapshot_params(model);
    const std::vector<ImagePair> pairs = occlusion_task(2, 8, 61);
    recon::TrainHyper hyper;
    hyper.epochs = 0;
    hyper.batch = 1;
    const recon::TrainReport report = recon::train(model, pairs, {}, hyper);
    CHECK(report.steps == 0);
    CHECK(report.epoch_loss.empty());
    CHECK(snapshot_params(model) == before);
    // Empty validation set scores the training pairs instead.
    CHECK(report.final_val_loss == doctest::Approx(recon::mean_mse(model, pairs)).epsilon(1e-12));
}

TEST_CASE("non-finite loss aborts training with a diagnostic") {
    UNet model = recon::build_model({8, 1, 2}, 71);
    std::vector<ImagePair> pairs = occlusion_task(2, 8, 81);
    pairs[0].occluded.at(0, 0, 0) = std::numeric_limits<float>::quiet_NaN();
    recon::TrainHyper hyper;
    hyper.epochs = 1;
    hyper.batch = 2;
    CHECK_THROWS_AS(recon::train(model, pairs, {}, hyper), TrainError);
}

TEST_CASE("inpainting a fixed occlusion beats leaving it untouched") {
    const int size = 32;
    const std::vector<ImagePair> pairs = occlusion_task(200, size, 90001);
    const std::vector<ImagePair> train_pairs(pairs.begin(), pairs.begin() + 160);
    const std::vector<ImagePair> val_pairs(pairs.begin() + 160, pairs.end());

    UNet model = recon::build_model({size, 2, 8}, 4242);
    recon::TrainHyper hyper;
    hyper.batch = 16;
    hyper.lr = 3e-3;
    hyper.epochs = 10;
    hyper.seed = 4242;
    const recon::TrainReport report = recon::train(model, train_pairs, val_pairs, hyper);

    REQUIRE(report.epoch_loss.size() == 10);
    CHECK(report.steps == 10 * 10); // 160 pairs / batch 16, per epoch
    CHECK(report.epoch_loss.front() > report.epoch_loss.back());

    const double baseline = recon::identity_baseline_mse(val_pairs, size);
    CHECK(report.final_val_loss < 0.25 * baseline);
    CHECK(report.final_val_loss ==
          doctest::Approx(recon::mean_mse(model, val_pairs)).epsilon(1e-9));
}

TEST_CASE("training is seed-deterministic") {
    const std::vector<ImagePair> pairs = occlusion_task(8, 8, 111);
    recon::TrainHyper hyper;
    hyper.batch = 4;
    hyper.epochs = 2;
    hyper.seed = 9;
    UNet a = recon::build_model({8, 1, 2}, 3);
    UNet b = recon::build_model({8, 1, 2}, 3);
    const recon::TrainReport ra = recon::train(a, pairs, {}, hyper);
    const recon::TrainReport rb = recon::train(b, pairs, {}, hyper);
    CHECK(ra.epoch_loss == rb.epoch_loss);
    CHECK(ra.final_val_loss == rb.final_val_loss);
    CHECK(snapshot_params(a) == snapshot_params(b));
}

TEST_CASE("reconstruction keeps the original frame size") {
    UNet model = recon::build_model({16, 2, 2}, 17);
    Rng rng(120);
    Image img(90, 110);
    for (float& v : img.data()) v = static_cast<float>(rng.uniform());
    const Image out = recon::reconstruct(model, img);
    CHECK(out.width() == 90);
    CHECK(out.height() == 110);
    for (float v : out.data()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    const Image again = recon::reconstruct(model, img);
    CHECK(out.data() == again.data());
}

TEST_CASE("checkpoints round-trip the model exactly") {
    const auto dir = temp_dir();
    const std::string path = (dir / "model.ckpt").string();
    UNet model = recon::build_model({16, 2, 3}, 23);
    model.trained_on = "corpus-a";
    recon::save_checkpoint(model, path);

    UNet loaded = recon::load_checkpoint(path);
    CHECK(loaded.config.input_size == model.config.input_size);
    CHECK(loaded.config.depth == model.config.depth);
    CHECK(loaded.config.base_channels == model.config.base_channels);
    CHECK(loaded.init_seed == model.init_seed);
    CHECK(loaded.trained_on == "corpus-a");
    CHECK(snapshot_params(loaded) == snapshot_params(model));

    Rng rng(130);
    const Tensor x = random_tensor(3, 16, 16, rng);
    CHECK(model.forward(x).v == loaded.forward(x).v);
}

TEST_CASE("damaged checkpoints are rejected") {
    const auto dir = temp_dir();
    const std::string path = (dir / "damaged.ckpt").string();
    UNet model = recon::build_model({16, 2, 3}, 27);
    recon::save_checkpoint(model, path);

    // Truncate the payload.
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<std::streamsize>(all.size() / 2));
    }
    CHECK_THROWS_AS(recon::load_checkpoint(path), IoError);

    const std::string garbled = (dir / "garbled.ckpt").string();
    {
        std::ofstream out(garbled);
        out << "{\"format\":\"something-else\"}\n";
    }
    CHECK_THROWS_AS(recon::load_checkpoint(garbled), IoError);
    CHECK_THROWS_AS(recon::load_checkpoint((dir / "absent.ckpt").string()), IoError);
}
