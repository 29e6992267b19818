#include "convsim/authflow.hpp"

#include <cstdio>
#include <stdexcept>

namespace convsim {

const char* to_string(AuthKind k) {
    switch (k) {
        case AuthKind::WlanEap: return "wlan_eap";
        case AuthKind::WlanOpen: return "wlan_open";
        case AuthKind::UmtsAttach: return "umts_attach";
    }
    return "?";
}

namespace {

std::string make_imsi(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "00101%010d", i);
    return buf;
}

}  // namespace

AuthManager::AuthManager(SimEngine& eng, Network& net, const Scenario& sc,
                         uint64_t seed)
    : eng_(eng),
      net_(net),
      sc_(sc),
      proto_(sc.protocol == SimProtocol::Aka ? Protocol::Aka : Protocol::EcdhAka),
      step_rng_(Rng::derive_seed(seed, "steps")),
      sync_rng_(Rng::derive_seed(seed, "sync")),
      ctx_([&] {
          Rng r(Rng::derive_seed(seed, "server"));
          CurveParams curve = sc.curve_name == "toy" ? CurveParams::toy()
                                                     : CurveParams::p256();
          return ServerContext::make(from_string("home-aaa"),
                                     from_string("hotspot-1"),
                                     std::move(curve), r);
      }()) {
    Rng prov(Rng::derive_seed(seed, "provision"));
    for (int i = 0; i < sc_.wlan_workstations; ++i) {
        std::string imsi = make_imsi(i);
        SubscriberKey k = SubscriberKey::from_bytes(prov.bytes(16));
        hss_.provision(imsi, k);
        usims_.emplace_back(imsi, k);
        imsis_.push_back(std::move(imsi));
    }
    trust_.server_ids.push_back(ctx_.server_id);
    trust_.ap_ids.push_back(ctx_.ap_id);
    trust_.curve = ctx_.curve;
}

void AuthManager::start() {
    const double first = 0.5;
    for (int i = 0; i < sc_.wlan_workstations; ++i)
        schedule_wlan(i, first + i * sc_.auth_stagger_s);
    for (int i = 0; i < sc_.umts_workstations; ++i)
        schedule_umts(i, first + (sc_.wlan_workstations + i) * sc_.auth_stagger_s);
}

void AuthManager::schedule_wlan(int i, double at) {
    if (at >= sc_.duration_s) return;
    eng_.schedule(at, [this, i, at] {
        start_wlan_eap(i);
        schedule_wlan(i, at + sc_.reauth_period_s);
    });
}

void AuthManager::schedule_umts(int i, double at) {
    if (at >= sc_.duration_s) return;
    eng_.schedule(at, [this, i, at] {
        start_umts_attach(i);
        schedule_umts(i, at + sc_.reauth_period_s);
    });
}

uint64_t AuthManager::start_wlan_eap(int i) {
    // A station whose stored sequence window has run ahead of the subscriber
    // store rejects the next challenge as stale and triggers the
    // resynchronisation round. Only the sequence-number method can desync.
    if (proto_ == Protocol::Aka && sync_rng_.uniform() < sc_.p_sync)
        usims_[i].sqn.last_accepted = hss_.sqn_of(imsis_[i]) + 64;

    uint64_t flow = net_.new_flow();
    EapFlow ef{AuthSessionStats{}, PeerSession(proto_),
               ServerSession(proto_, ctx_), i, std::nullopt, 0};
    ef.st.flow = flow;
    ef.st.station = net_.topo().wlan_ws[i];
    ef.st.kind = AuthKind::WlanEap;
    ef.st.protocol = sc_.protocol;
    ef.st.started = eng_.now();
    auto [it, ok] = eap_.emplace(flow, std::move(ef));
    if (!ok) throw std::logic_error("flow id reuse");
    step_server(it->second, std::nullopt);  // message 1 needs no vector
    return flow;
}

uint64_t AuthManager::start_wlan_open(int i) {
    const Topology& t = net_.topo();
    int ws = t.wlan_ws[i];
    ScriptFlow sf;
    sf.st.kind = AuthKind::WlanOpen;
    sf.st.protocol = sc_.protocol;
    sf.st.station = ws;
    uint32_t sz = sc_.open_auth_msg_bytes;
    sf.legs = {{t.aaa, ws, sz, 0}, {ws, t.aaa, sz, 0}, {t.aaa, ws, sz, 0}};
    return start_script(std::move(sf));
}

uint64_t AuthManager::start_umts_attach(int i) {
    const Topology& t = net_.topo();
    int ue = t.umts_ws[i];
    uint32_t sz = sc_.umts_attach_msg_bytes;
    ScriptFlow sf;
    sf.st.kind = AuthKind::UmtsAttach;
    sf.st.protocol = sc_.protocol;
    sf.st.station = ue;
    // Attach request up, vector fetch at the HLR, challenge down, response
    // up. Each adjacent-element exchange is one message.
    sf.legs = {{ue, t.nodeb, sz, 0},
               {t.nodeb, t.rnc, sz, 0},
               {t.rnc, t.sgsn, sz, 0},
               {t.sgsn, t.hlr, sz, 0},
               {t.hlr, t.sgsn, sz, sc_.hlr_service_s},
               {t.sgsn, t.rnc, sz, 0},
               {t.rnc, t.nodeb, sz, 0},
               {t.nodeb, ue, sz, 0},
               {ue, t.nodeb, sz, 0},
               {t.nodeb, t.rnc, sz, 0},
               {t.rnc, t.sgsn, sz, 0}};
    return start_script(std::move(sf));
}

uint64_t AuthManager::start_script(ScriptFlow sf) {
    uint64_t flow = net_.new_flow();
    sf.st.flow = flow;
    sf.st.started = eng_.now();
    auto [it, ok] = script_.emplace(flow, std::move(sf));
    if (!ok) throw std::logic_error("flow id reuse");
    send_leg(it->second);
    return flow;
}

void AuthManager::send_leg(ScriptFlow& sf) {
    const ScriptLeg& leg = sf.legs[sf.next++];
    Packet p;
    p.flow = sf.st.flow;
    p.seq = ++sf.seq;
    p.src = leg.src;
    p.dst = leg.dst;
    p.size_bytes = leg.size + sc_.framing_bytes;
    p.kind = PacketKind::Auth;
    sf.st.messages++;
    net_.inject(std::move(p));
}

void AuthManager::send_eap(EapFlow& ef, int src, int dst, const Bytes& wire) {
    Packet p;
    p.flow = ef.st.flow;
    p.seq = ++ef.seq;
    p.src = src;
    p.dst = dst;
    p.size_bytes = static_cast<uint32_t>(wire.size()) + sc_.framing_bytes;
    p.kind = PacketKind::Auth;
    p.payload = wire;
    ef.st.messages++;
    net_.inject(std::move(p));
}

bool AuthManager::needs_consult(const Bytes& wire) const {
    if (proto_ != Protocol::Aka) return false;
    auto decoded = decode_eap(wire);
    if (!std::holds_alternative<EapMessage>(decoded)) return false;
    const EapMessage& m = std::get<EapMessage>(decoded);
    if (m.code != EapCode::Response) return false;
    // Identity needs a fresh vector; a sync failure needs the store to
    // accept AUTS and issue a replacement. Both are HLR round trips.
    return m.subtype == static_cast<uint8_t>(EapSubtype::Identity) ||
           m.subtype == static_cast<uint8_t>(EapSubtype::SyncFailure);
}

void AuthManager::step_server(EapFlow& ef, const std::optional<Bytes>& wire) {
    StepOutput out = server_step(ef.server, wire, hss_, step_rng_);
    if (out.send)
        send_eap(ef, net_.topo().aaa, ef.st.station, encode_eap(*out.send));
    else if (out.failed)
        finish_eap(ef.st.flow);
}

void AuthManager::step_peer(EapFlow& ef, const Bytes& wire) {
    StepOutput out = peer_step(ef.peer, wire, usims_[ef.ws_index], trust_,
                               step_rng_);
    ef.st.resyncs = ef.peer.resyncs_sent;
    if (out.send)
        send_eap(ef, ef.st.station, net_.topo().aaa, encode_eap(*out.send));
    else
        finish_eap(ef.st.flow);  // terminal: Success accepted or silent failure
}

void AuthManager::handle_eap(EapFlow& ef, const Packet& pkt) {
    const Topology& t = net_.topo();
    if (pkt.dst == t.hlr) {
        // Vector request at the HLR: serve it, then answer on the wire.
        uint64_t flow = ef.st.flow;
        uint32_t seq = ++ef.seq;
        eng_.schedule(eng_.now() + sc_.hlr_service_s, [this, flow, seq] {
            Packet r;
            r.flow = flow;
            r.seq = seq;
            r.src = net_.topo().hlr;
            r.dst = net_.topo().aaa;
            r.size_bytes = sc_.hlr_msg_bytes;
            r.kind = PacketKind::Auth;
            net_.inject(std::move(r));
        });
        return;
    }
    if (pkt.dst == t.aaa && pkt.payload.empty()) {
        // Vector response: release the cell and resume the parked frame.
        net_.end_auth_hold();
        Bytes held = std::move(*ef.held);
        ef.held.reset();
        step_server(ef, held);
        return;
    }
    if (pkt.dst == t.aaa) {
        if (needs_consult(pkt.payload)) {
            ef.held = pkt.payload;
            ef.st.consults++;
            net_.begin_auth_hold();
            Packet q;
            q.flow = ef.st.flow;
            q.seq = ++ef.seq;
            q.src = t.aaa;
            q.dst = t.hlr;
            q.size_bytes = sc_.hlr_msg_bytes;
            q.kind = PacketKind::Auth;
            net_.inject(std::move(q));
        } else {
            step_server(ef, pkt.payload);
        }
        return;
    }
    step_peer(ef, pkt.payload);
}

void AuthManager::on_delivered(const Packet& pkt) {
    if (auto it = eap_.find(pkt.flow); it != eap_.end()) {
        handle_eap(it->second, pkt);
        return;
    }
    if (auto it = script_.find(pkt.flow); it != script_.end()) {
        ScriptFlow& sf = it->second;
        if (sf.next < sf.legs.size()) {
            double pre = sf.legs[sf.next].pre_delay;
            if (pre > 0) {
                uint64_t flow = pkt.flow;
                eng_.schedule(eng_.now() + pre, [this, flow] {
                    if (auto i2 = script_.find(flow); i2 != script_.end())
                        send_leg(i2->second);
                });
            } else {
                send_leg(sf);
            }
            return;
        }
        sf.st.completed = true;
        sf.st.finished = eng_.now();
        completed_.push_back(sf.st);
        script_.erase(it);
    }
}

void AuthManager::finish_eap(uint64_t flow) {
    auto it = eap_.find(flow);
    if (it == eap_.end()) return;
    EapFlow& ef = it->second;
    ef.st.completed = ef.peer.state == SessionState::Done &&
                      ef.server.state == SessionState::Done;
    ef.st.finished = eng_.now();
    completed_.push_back(ef.st);
    eap_.erase(it);
}

int AuthManager::total_resyncs() const {
    int n = 0;
    for (const auto& s : completed_) n += s.resyncs;
    for (const auto& [f, ef] : eap_) n += ef.st.resyncs;
    return n;
}

int AuthManager::total_consults() const {
    int n = 0;
    for (const auto& s : completed_) n += s.consults;
    for (const auto& [f, ef] : eap_) n += ef.st.consults;
    return n;
}

AuthSessionStats measure_auth_session(AuthKind kind, SimProtocol proto,
                                      Coupling coupling) {
    Scenario sc;
    sc.coupling = coupling;
    sc.protocol = proto;
    sc.p_sync = 0;  // honest session: no injected desync
    sc.duration_s = 30;
    sc.seed = 7;
    SimEngine eng;
    Network net(eng, Rng::derive_seed(sc.seed, "air"), sc, build_topology(sc));
    AuthManager auth(eng, net, sc, Rng::derive_seed(sc.seed, "auth"));
    net.on_delivered = [&](const Packet& p) {
        if (p.kind == PacketKind::Auth) auth.on_delivered(p);
    };
    switch (kind) {
        case AuthKind::WlanEap: auth.start_wlan_eap(0); break;
        case AuthKind::WlanOpen: auth.start_wlan_open(0); break;
        case AuthKind::UmtsAttach: auth.start_umts_attach(0); break;
    }
    eng.run_until(sc.duration_s);
    if (auth.completed_log().empty()) return AuthSessionStats{};
    return auth.completed_log().front();
}

}  // namespace convsim
