#include "convsim/netsim.hpp"

#include <algorithm>
#include <stdexcept>

namespace convsim {

Network::Network(SimEngine& eng, uint64_t air_seed, const Scenario& sc, Topology topo)
    : eng_(eng), sc_(sc), topo_(std::move(topo)), air_rng_(air_seed) {
    wired_.resize(topo_.links.size());
    stats_.resize(topo_.links.size());
    ws_q_.resize(topo_.wlan_ws.size());
    ws_index_of_.assign(topo_.nodes.size(), -1);
    for (size_t i = 0; i < topo_.wlan_ws.size(); ++i)
        ws_index_of_[topo_.wlan_ws[i]] = static_cast<int>(i);
}

void Network::inject(Packet p) {
    p.id = next_packet_++;
    p.dscp = dscp_for(p.kind);
    p.created_at = p.retx ? p.created_at : eng_.now();
    p.hops.clear();
    p.hops.push_back(Hop{p.src, eng_.now()});
    p.node_mask = kind_bit(topo_.nodes[p.src].kind);
    p.crossed_air = false;
    p.crossed_umts = false;

    auto& c = counters_[static_cast<int>(p.kind)];
    ++c.sent;
    c.sent_bytes += p.size_bytes;
    ++live_;
    if (on_injected) on_injected(p);

    if (p.src == p.dst) {
        deliver(std::move(p));
        return;
    }
    int link = topo_.route_next(p.dscp, p.src, p.dst);
    if (link < 0) throw std::logic_error("no route from " + topo_.nodes[p.src].name +
                                         " to " + topo_.nodes[p.dst].name);
    int src = p.src;
    enqueue_on_link(link, std::move(p), src);
}

void Network::begin_auth_hold() { ++hold_depth_; }

void Network::end_auth_hold() {
    if (hold_depth_ > 0) --hold_depth_;
    if (!cell_held()) air_try_serve();
}

void Network::rotate_windows() {
    busy_prob_ = std::min(sc_.wlan_busy_cap,
                          static_cast<double>(air_window_offered_bits_) / sc_.wlan_bps);
    air_window_offered_bits_ = 0;
    for (auto& s : stats_) {
        s.win_arrived_bytes = 0;
        s.win_delivered_bytes = 0;
    }
}

void Network::enqueue_on_link(int link_id, Packet pkt, int from_node) {
    const LinkConf& l = topo_.links[link_id];
    auto& st = stats_[link_id];
    st.arrived_bytes += pkt.size_bytes;
    st.win_arrived_bytes += pkt.size_bytes;

    if (l.is_air) {
        bool downlink = (from_node == topo_.ap);
        AirFrame f;
        f.ready = eng_.now();
        f.downlink = downlink;
        f.ws_index = downlink ? -1 : ws_index_of_[from_node];
        f.link_id = link_id;
        f.pkt = std::move(pkt);
        air_window_offered_bits_ += uint64_t(f.pkt.size_bytes) * 8;
        air_enqueue(std::move(f));
        return;
    }

    int dir = (from_node == l.a) ? 0 : 1;
    DirState& d = wired_[link_id].dir[dir];
    if (pkt.kind != PacketKind::Auth &&
        d.q_bytes + pkt.size_bytes > l.queue_cap_bytes) {
        drop(std::move(pkt), link_id);
        return;
    }
    d.q_bytes += pkt.size_bytes;
    d.q.push_back(std::move(pkt));
    if (!d.busy) wired_start_tx(link_id, dir);
}

void Network::wired_start_tx(int link_id, int dir) {
    const LinkConf& l = topo_.links[link_id];
    DirState& d = wired_[link_id].dir[dir];
    d.busy = true;
    double tx = static_cast<double>(d.q.front().size_bytes) * 8.0 / l.bps;
    eng_.schedule(eng_.now() + tx, [this, link_id, dir] {
        const LinkConf& l = topo_.links[link_id];
        DirState& d = wired_[link_id].dir[dir];
        Packet pkt = std::move(d.q.front());
        d.q.pop_front();
        d.q_bytes -= pkt.size_bytes;
        int to_node = (dir == 0) ? l.b : l.a;
        eng_.schedule(eng_.now() + l.delay_s,
                      [this, link_id, to_node, pkt = std::move(pkt)]() mutable {
                          auto& st = stats_[link_id];
                          st.delivered_bytes += pkt.size_bytes;
                          st.win_delivered_bytes += pkt.size_bytes;
                          node_receive(to_node, std::move(pkt), link_id);
                      });
        if (!d.q.empty())
            wired_start_tx(link_id, dir);
        else
            d.busy = false;
    });
}

void Network::node_receive(int node, Packet pkt, int via_link) {
    pkt.hops.push_back(Hop{node, eng_.now()});
    pkt.node_mask |= kind_bit(topo_.nodes[node].kind);
    if (via_link >= 0) {
        const LinkConf& l = topo_.links[via_link];
        if (l.is_air) pkt.crossed_air = true;
        if (l.umts_domain) pkt.crossed_umts = true;
    }
    if (node == pkt.dst) {
        deliver(std::move(pkt));
        return;
    }
    int link = topo_.route_next(pkt.dscp, node, pkt.dst);
    if (link < 0) throw std::logic_error("no route at " + topo_.nodes[node].name);
    enqueue_on_link(link, std::move(pkt), node);
}

void Network::deliver(Packet pkt) {
    auto& c = counters_[static_cast<int>(pkt.kind)];
    ++c.delivered;
    c.delivered_bytes += pkt.size_bytes;
    --live_;
    if (on_delivered) on_delivered(pkt);
}

void Network::drop(Packet pkt, int link_id) {
    auto& c = counters_[static_cast<int>(pkt.kind)];
    ++c.dropped;
    c.dropped_bytes += pkt.size_bytes;
    auto& st = stats_[link_id];
    ++st.dropped_packets;
    st.dropped_bytes += pkt.size_bytes;
    --live_;
    if (on_dropped) on_dropped(pkt, link_id);

    // Elastic transfers recover: the source resends the lost segment after
    // its timeout. Media and billing records are not retransmitted.
    if (pkt.kind == PacketKind::Ftp || pkt.kind == PacketKind::Http) {
        Packet again;
        again.flow = pkt.flow;
        again.seq = pkt.seq;
        again.src = pkt.src;
        again.dst = pkt.dst;
        again.size_bytes = pkt.size_bytes;
        again.kind = pkt.kind;
        again.created_at = pkt.created_at;
        again.retx = true;
        eng_.schedule(eng_.now() + sc_.retx_timeout_s,
                      [this, again = std::move(again)]() mutable { inject(std::move(again)); });
    }
}

void Network::air_enqueue(AirFrame f) {
    if (f.downlink) {
        if (f.pkt.kind != PacketKind::Auth &&
            ap_q_.bytes + f.pkt.size_bytes > sc_.wlan_ap_queue_bytes) {
            drop(std::move(f.pkt), f.link_id);
            return;
        }
        ap_q_.bytes += f.pkt.size_bytes;
        ap_q_.q.push_back(std::move(f));
    } else {
        AirQueue& q = ws_q_[f.ws_index];
        q.bytes += f.pkt.size_bytes;
        q.q.push_back(std::move(f));
    }
    air_try_serve();
}

void Network::air_try_serve() {
    if (air_serving_) return;

    // One transmission at a time on the cell. The next frame is the oldest
    // eligible queue head; the AP wins ties, then the lowest station index.
    AirQueue* best = nullptr;
    bool held = cell_held();
    auto consider = [&](AirQueue& q) {
        if (q.q.empty()) return;
        const AirFrame& head = q.q.front();
        if (held && head.pkt.kind != PacketKind::Auth) return;
        if (!best || head.ready < best->q.front().ready) best = &q;
    };
    consider(ap_q_);
    for (auto& q : ws_q_) consider(q);
    if (!best) return;

    AirFrame f = std::move(best->q.front());
    best->q.pop_front();
    best->bytes -= f.pkt.size_bytes;
    air_serving_ = true;

    // Contention: the window widens linearly with sensed utilization, then
    // one draw of backoff slots.  Bounded growth keeps the cell stable under
    // transient overload; the station never spirals into cw_max.
    int cw = static_cast<int>(sc_.wlan_cw_min * (1.0 + 3.0 * busy_prob_));
    cw = std::min(cw, sc_.wlan_cw_max);
    double wait = sc_.wlan_slot_s *
                  static_cast<double>(air_rng_.uniform_int(0, static_cast<uint64_t>(cw)));
    double dur = static_cast<double>(f.pkt.size_bytes) * 8.0 / sc_.wlan_bps;
    if (on_air_access_delay) on_air_access_delay(eng_.now() - f.ready + wait);

    eng_.schedule(eng_.now() + wait + dur,
                  [this, f = std::move(f)]() mutable { air_finish(std::move(f)); });
}

void Network::air_finish(AirFrame f) {
    auto& st = stats_[f.link_id];
    st.delivered_bytes += f.pkt.size_bytes;
    st.win_delivered_bytes += f.pkt.size_bytes;
    const LinkConf& l = topo_.links[f.link_id];
    int to_node = f.downlink ? (l.a == topo_.ap ? l.b : l.a) : topo_.ap;
    int via = f.link_id;
    air_serving_ = false;
    node_receive(to_node, std::move(f.pkt), via);
    air_try_serve();
}

}  // namespace convsim
