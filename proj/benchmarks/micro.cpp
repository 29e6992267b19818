#include <benchmark/benchmark.h>

#include "convsim/eap.hpp"
#include "convsim/ec.hpp"
#include "convsim/engine.hpp"
#include "convsim/prf.hpp"
#include "convsim/seceval.hpp"
#include "convsim/simrun.hpp"

using namespace convsim;

namespace {

void bm_scalar_mul_toy(benchmark::State& state) {
    CurveParams c = CurveParams::toy();
    Rng rng(1);
    Scalar k = random_scalar(rng, c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scalar_mul(k, c.g, c));
    }
}
BENCHMARK(bm_scalar_mul_toy);

void bm_scalar_mul_p256(benchmark::State& state) {
    CurveParams c = CurveParams::p256();
    Rng rng(1);
    Scalar k = random_scalar(rng, c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scalar_mul(k, c.g, c));
    }
}
BENCHMARK(bm_scalar_mul_p256);

void bm_prf_one_block(benchmark::State& state) {
    Bytes key(16, 0x5A);
    Bytes data(48, 0x11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prf(key, PrfTag::Mac, data, 128));
    }
}
BENCHMARK(bm_prf_one_block);

void bm_prf_two_blocks(benchmark::State& state) {
    Bytes key(16, 0x5A);
    Bytes data(48, 0x11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prf(key, PrfTag::Msk, data, 512));
    }
}
BENCHMARK(bm_prf_two_blocks);

void bm_codec_round_trip(benchmark::State& state) {
    EapMessage m;
    m.code = EapCode::Request;
    m.identifier = 3;
    m.method = EapMethod::Aka;
    m.subtype = 1;
    m.add_attr(AT_RAND, Bytes(16, 0xAA));
    m.add_attr(AT_AUTN, Bytes(16, 0xBB));
    m.add_attr(AT_ENCR_DATA, Bytes(48, 0xCC));
    m.add_attr(AT_MAC, Bytes(16, 0xDD));
    for (auto _ : state) {
        Bytes wire = encode_eap(m);
        auto back = decode_eap(wire);
        benchmark::DoNotOptimize(back);
    }
}
BENCHMARK(bm_codec_round_trip);

void bm_engine_events(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        SimEngine eng;
        uint64_t hits = 0;
        for (int i = 0; i < n; ++i)
            eng.schedule(i * 1e-6, [&hits] { ++hits; });
        eng.run_until(1.0);
        benchmark::DoNotOptimize(hits);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_engine_events)->Arg(1000)->Arg(10000);

void bm_dialog(benchmark::State& state, Protocol proto) {
    HssHandle hss;
    hss.provision("001011234567890", SubscriberKey::from_bytes(Bytes(16, 0x3C)));
    UsimHandle usim("001011234567890",
                    SubscriberKey::from_bytes(Bytes(16, 0x3C)));
    Rng crng(99);
    ServerContext ctx =
        ServerContext::make(from_string("home-aaa"), from_string("hotspot-1"),
                            CurveParams::p256(), crng);
    PeerTrust trust;
    trust.server_ids = {from_string("home-aaa")};
    trust.ap_ids = {from_string("hotspot-1")};
    trust.curve = CurveParams::p256();
    uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        benchmark::DoNotOptimize(run_dialog(proto, hss, usim, ctx, trust, rng));
    }
}
BENCHMARK_CAPTURE(bm_dialog, symmetric, Protocol::Aka);
BENCHMARK_CAPTURE(bm_dialog, key_agreement, Protocol::EcdhAka);

void bm_short_simulation(benchmark::State& state) {
    Scenario sc;
    sc.duration_s = 30;
    sc.traffic_stop_s = 25;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_simulation(sc));
    }
}
BENCHMARK(bm_short_simulation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
