#include "doctest.h"

#include <variant>

#include "convsim/aka.hpp"
#include "convsim/rng.hpp"

using namespace convsim;

namespace {

SubscriberKey test_key() {
    return SubscriberKey::from_bytes(from_hex("465b5ce8b199b49faa5f0a2ee238a6bc"));
}
Bytes test_rand() { return from_hex("23553cbe9637a89d218ae64dae47bf35"); }

}  // namespace

TEST_CASE("vector fields have the documented shapes and derivations") {
    SubscriberKey k = test_key();
    Bytes rand = test_rand();
    uint64_t sqn = 0x123456;
    uint16_t amf = 0x8000;
    AuthVector v = aka_generate_vector(k, sqn, amf, rand);

    CHECK(v.rand == rand);
    CHECK(v.xres.size() == 8);
    CHECK(v.ck.size() == 16);
    CHECK(v.ik.size() == 16);
    CHECK(v.autn.size() == 16);
    CHECK(v.sqn == sqn);

    CHECK(v.xres == f2(k, rand));
    CHECK(v.ck == f3(k, rand));
    CHECK(v.ik == f4(k, rand));

    // autn = SQN^AK (6) || AMF (2) || MAC-A (8)
    Bytes ak = f5(k, rand);
    REQUIRE(ak.size() == 6);
    uint64_t sqn_recovered = 0;
    for (int i = 0; i < 6; ++i)
        sqn_recovered = (sqn_recovered << 8) | (v.autn[i] ^ ak[i]);
    CHECK(sqn_recovered == sqn);
    CHECK(v.autn[6] == 0x80);
    CHECK(v.autn[7] == 0x00);
    CHECK(Bytes(v.autn.begin() + 8, v.autn.end()) == f1(k, rand, sqn, amf));
}

TEST_CASE("function family output sizes") {
    SubscriberKey k = test_key();
    CHECK(f1(k, test_rand(), 1, 0).size() == 8);
    CHECK(f1_star(k, test_rand(), 1).size() == 8);
    CHECK(f2(k, test_rand()).size() == 8);
    CHECK(f3(k, test_rand()).size() == 16);
    CHECK(f4(k, test_rand()).size() == 16);
    CHECK(f5(k, test_rand()).size() == 6);
    // distinct functions of the same inputs
    CHECK(f3(k, test_rand()) != f4(k, test_rand()));
}

TEST_CASE("fresh challenge verifies, releases keys and advances the window") {
    SubscriberKey k = test_key();
    AuthVector v = aka_generate_vector(k, 100, 0, test_rand());
    SqnState st;
    st.last_accepted = 99;

    auto r = verify_autn(k, v.rand, v.autn, st);
    REQUIRE(std::holds_alternative<AkaOk>(r));
    const AkaOk& ok = std::get<AkaOk>(r);
    CHECK(ok.res == v.xres);
    CHECK(ok.ck == v.ck);
    CHECK(ok.ik == v.ik);
    CHECK(ok.sqn == 100);
    CHECK(st.last_accepted == 100);
    CHECK(st.ops > 0);
}

TEST_CASE("tampered challenge is a mac failure and leaves the window alone") {
    SubscriberKey k = test_key();
    AuthVector v = aka_generate_vector(k, 100, 0, test_rand());
    SqnState st;
    st.last_accepted = 99;

    for (size_t i = 0; i < v.autn.size(); ++i) {
        // flips inside SQN^AK or AMF change the f1 input; flips inside MAC-A
        // change the tag itself. Either way verification must fail.
        Bytes bad = v.autn;
        bad[i] ^= 0x40;
        auto r = verify_autn(k, v.rand, bad, st);
        CHECK(std::holds_alternative<MacFailure>(r));
    }
    Bytes wrong_rand = v.rand;
    wrong_rand[3] ^= 1;
    CHECK(std::holds_alternative<MacFailure>(verify_autn(k, wrong_rand, v.autn, st)));
    CHECK(st.last_accepted == 99);
}

TEST_CASE("stale challenge triggers resync and the store recovers the counter") {
    SubscriberKey k = test_key();
    // The peer has already accepted 500; the store is behind at 120.
    AuthVector v = aka_generate_vector(k, 120, 0, test_rand());
    SqnState st;
    st.last_accepted = 500;

    auto r = verify_autn(k, v.rand, v.autn, st);
    REQUIRE(std::holds_alternative<SyncFailure>(r));
    const Bytes& auts = std::get<SyncFailure>(r).auts;
    CHECK(auts.size() == 14);
    CHECK(st.last_accepted == 500);  // resync does not advance the window

    auto rec = resynchronize(k, v.rand, auts);
    REQUIRE(std::holds_alternative<uint64_t>(rec));
    CHECK(std::get<uint64_t>(rec) == 500);
}

TEST_CASE("auts replayed against a different rand is rejected") {
    SubscriberKey k = test_key();
    AuthVector v = aka_generate_vector(k, 120, 0, test_rand());
    SqnState st;
    st.last_accepted = 500;
    auto r = verify_autn(k, v.rand, v.autn, st);
    REQUIRE(std::holds_alternative<SyncFailure>(r));
    Bytes auts = std::get<SyncFailure>(r).auts;

    Bytes other_rand = test_rand();
    other_rand[0] ^= 0xFF;
    CHECK(std::holds_alternative<RejectAuts>(resynchronize(k, other_rand, auts)));

    Bytes cut = auts;
    cut.pop_back();
    CHECK(std::holds_alternative<RejectAuts>(resynchronize(k, v.rand, cut)));

    Bytes flipped = auts;
    flipped[13] ^= 1;
    CHECK(std::holds_alternative<RejectAuts>(resynchronize(k, v.rand, flipped)));
}

TEST_CASE("window edges: strictly ahead and within delta") {
    SqnState st;
    st.last_accepted = 1000;
    st.delta_max = 16;
    CHECK(!st.accepts(1000));       // not strictly ahead
    CHECK(!st.accepts(999));
    CHECK(st.accepts(1001));        // accepts() is pure; advance() moves it
    CHECK(st.accepts(1016));
    CHECK(!st.accepts(1017));       // beyond the window
    st.advance(1016);
    CHECK(st.last_accepted == 1016);
    CHECK(!st.accepts(1016));
    CHECK(st.accepts(1017));
    CHECK(st.ops == 8);
}

TEST_CASE("same inputs always produce the same vector") {
    SubscriberKey k = test_key();
    AuthVector a = aka_generate_vector(k, 7, 0xB00F, test_rand());
    AuthVector b = aka_generate_vector(k, 7, 0xB00F, test_rand());
    CHECK(a.rand == b.rand);
    CHECK(a.xres == b.xres);
    CHECK(a.autn == b.autn);

    AuthVector c = aka_generate_vector(k, 8, 0xB00F, test_rand());
    CHECK(a.autn != c.autn);  // sqn is in the clear part and the mac
}
