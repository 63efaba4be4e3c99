// SPDX-License-Identifier: Apache-2.0

#include "trimf/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "trimf/errors.hpp"

namespace trimf {

namespace {
constexpr double kLogEps = 1e-12;
}

std::vector<Parameter*> Model::parameters() {
    std::vector<Parameter*> out;
    encoder.collect(out);
    mfa_forms.collect(out);
    graph.collect(out);
    span_trigger.collect(out);
    out.push_back(&entity_classifier);
    out.push_back(&relation_classifier);
    return out;
}

std::vector<Parameter*> Model::parameters_for_groups(
    const std::set<std::string>& groups) {
    std::vector<Parameter*> out;
    for (Parameter* p : parameters())
        if (groups.count(p->group)) out.push_back(p);
    return out;
}

Model init_model(const TrainConfig& cfg, const Corpus& corpus) {
    cfg.validate();
    if (corpus.entity_types.empty() || corpus.relation_types.empty())
        throw_corpus("corpus must declare entity and relation types");
    Model m;
    m.cfg = cfg;
    m.entity_types = corpus.entity_types;
    m.relation_types = corpus.relation_types;
    m.dependency_labels = corpus.dependency_labels;
    std::vector<std::string> words;
    for (const auto& s : corpus.sentences)
        words.insert(words.end(), s.tokens.begin(), s.tokens.end());
    m.vocab = SubwordVocab::build(words, size_t(cfg.vocab_size));

    size_t h = size_t(cfg.hidden);
    size_t h_mem = size_t(cfg.memory_slot_size);
    m.encoder = init_encoder(m.vocab.size(), h, size_t(cfg.encoder_layers),
                             size_t(cfg.encoder_heads),
                             derive_seed(cfg.seed, "encoder"));
    m.mfa_forms = init_mfa_forms(h, h_mem, h_mem, derive_seed(cfg.seed, "mfa"));
    m.graph = init_graph_params(h, std::max<size_t>(1, corpus.dependency_labels.size()),
                                derive_seed(cfg.seed, "graph"));
    m.span_trigger = init_span_trigger_params(
        h, m.h_s(), h_mem, size_t(cfg.max_span_size), size_t(cfg.width_embed_dim),
        derive_seed(cfg.seed, "span_trigger"));
    Rng cls_rng(derive_seed(cfg.seed, "classifier"));
    m.entity_classifier = {"classifier.entity", "classifier",
                           Tensor::randn(m.h_s(), h_mem, cls_rng, 0.0,
                                         1.0 / std::sqrt(double(m.h_s())), true)};
    m.relation_classifier = {
        "classifier.relation", "classifier",
        Tensor::randn(m.h_r(), h_mem, cls_rng, 0.0,
                      1.0 / std::sqrt(double(m.h_r())), true)};
    std::vector<std::string> entity_cats = corpus.entity_types;
    entity_cats.push_back("None");
    m.entity_memory = init_memory(MemoryKind::Entity, entity_cats, h_mem,
                                  derive_seed(cfg.seed, "entity_memory"));
    m.relation_memory = init_memory(MemoryKind::Relation, corpus.relation_types,
                                    h_mem, derive_seed(cfg.seed, "relation_memory"));
    return m;
}

PreparedSentence prepare_sentence(const Sentence& s, const Model& model) {
    PreparedSentence ps;
    ps.sentence = &s;
    ps.sub = tokenize(s.tokens, model.vocab);
    ps.dep.n = s.tokens.size();
    for (size_t ti = 0; ti < s.deps.size(); ++ti) {
        const auto& d = s.deps[ti];
        if (d.head < 0) continue;
        auto it = std::find(model.dependency_labels.begin(),
                            model.dependency_labels.end(), d.label);
        if (it == model.dependency_labels.end())
            throw_corpus("dependency label '" + d.label +
                         "' unknown to the model");
        ps.dep.edges.push_back({size_t(d.head), ti,
                                size_t(it - model.dependency_labels.begin())});
    }
    return ps;
}

PipelineOut run_pipeline(const Model& model, const PreparedSentence& ps,
                         const PipelineOptions& opt) {
    const TrainConfig& cfg = model.cfg;
    if (opt.train_mode && !opt.rng)
        throw_contract("train-mode pipeline needs an rng");
    Encoded enc = encode(ps.sub, model.encoder);

    bool mfa_active = opt.stage2 &&
                      (cfg.mfa_subword_level || cfg.mfa_word_level) &&
                      (cfg.mfa_entity_memory || cfg.mfa_relation_memory);
    Tensor e_w_bar;
    if (mfa_active) {
        MfaConfig mc{cfg.mfa_subword_level, cfg.mfa_word_level,
                     cfg.mfa_entity_memory, cfg.mfa_relation_memory};
        const Tensor& ent = model.entity_memory.slots;
        const Tensor& rel = model.relation_memory.slots;
        Tensor sub_ent = cfg.subword_mfa_grad ? ent : detach(ent);
        Tensor sub_rel = cfg.subword_mfa_grad ? rel : detach(rel);
        Tensor word_ent = cfg.word_mfa_grad ? ent : detach(ent);
        Tensor word_rel = cfg.word_mfa_grad ? rel : detach(rel);
        MultilevelOut mo =
            apply_multilevel(enc.e_d, ps.sub, sub_ent, sub_rel, word_ent,
                             word_rel, model.mfa_forms, mc, opt.traces);
        e_w_bar = mo.e_w_bar;
    } else {
        e_w_bar = pool_words(enc.e_d, ps.sub.spans_over_subwords());
    }

    FusionMode mode = fusion_mode_from_string(cfg.fusion_mode);
    Rng dummy(1);
    PipelineOut out;
    out.e_cls = enc.e_cls;
    out.e_g = graph_fusion(e_w_bar, enc.e_cls, ps.dep, model.graph, mode,
                           size_t(cfg.semantic_sample_k),
                           opt.rng ? *opt.rng : dummy, opt.train_mode);
    return out;
}

Tensor entity_scores(const Model& model, const Tensor& span_enc) {
    // classifier reads use frozen slots; write process owns slot updates
    return matmul(matmul(span_enc, model.entity_classifier.tensor),
                  transpose(detach(model.entity_memory.slots)));
}

Tensor entity_probs(const Model& model, const Tensor& span_enc) {
    return softmax_rows(entity_scores(model, span_enc));
}

Tensor relation_scores(const Model& model, const Tensor& pair_enc) {
    return matmul(matmul(pair_enc, model.relation_classifier.tensor),
                  transpose(detach(model.relation_memory.slots)));
}

Tensor relation_probs(const Model& model, const Tensor& pair_enc) {
    return sigmoid(relation_scores(model, pair_enc));
}

PairFeatures build_pair_features(const Model& model, const Tensor& e_g,
                                 const Span& head, const Span& tail,
                                 const Tensor& head_enc, const Tensor& tail_enc,
                                 bool stage2) {
    PairFeatures out;
    Tensor g_local = local_context(head, tail, e_g);
    Tensor g_trigger;
    if (stage2 && model.cfg.enable_trigger_sensor) {
        const Tensor& slots = model.relation_memory.slots;
        Tensor read_slots =
            model.cfg.trigger_sensor_grad ? slots : detach(slots);
        Tensor m_r = pair_relation_read(head_enc, tail_enc, read_slots,
                                        model.span_trigger.pair_read_form.tensor);
        TriggerAttendOut ta =
            trigger_attend(m_r, e_g, model.span_trigger.trigger_proj.tensor);
        g_trigger = ta.g_trigger;
        out.trigger_weights = ta.weights;
    } else {
        g_trigger = Tensor::zeros(1, model.h());
    }
    out.encoding = build_pair(head_enc, tail_enc, g_local, g_trigger);
    return out;
}

namespace {

size_t type_index(const std::vector<std::string>& types,
                  const std::string& name) {
    auto it = std::find(types.begin(), types.end(), name);
    if (it == types.end()) throw_corpus("unknown type: " + name);
    return size_t(it - types.begin());
}

}  // namespace

Candidates sample_negatives(const Model& model, const Sentence& s, Rng& rng) {
    const TrainConfig& cfg = model.cfg;
    Candidates out;
    size_t n = s.tokens.size();
    size_t none = model.none_index();

    std::set<Span> gold_spans;
    for (const auto& e : s.entities) gold_spans.insert({e.begin, e.end});
    for (const auto& e : s.entities)
        out.spans.push_back(
            {{e.begin, e.end}, type_index(model.entity_types, e.type)});
    std::vector<Span> pool;
    for (const Span& sp : enumerate_spans(n, size_t(cfg.max_span_size)))
        if (!gold_spans.count(sp)) pool.push_back(sp);
    auto picks = rng.sample_without_replacement(
        pool.size(), std::min<size_t>(pool.size(), size_t(cfg.neg_entity_count)));
    std::sort(picks.begin(), picks.end());
    for (size_t p : picks) out.spans.push_back({pool[p], none});

    // relation candidates over gold entity spans (teacher forcing); pairs
    // with overlapping endpoints have no local context and are skipped
    size_t n_rel = model.relation_types.size();
    std::vector<Span> ents;
    for (const auto& e : s.entities) ents.push_back({e.begin, e.end});
    std::map<std::pair<Span, Span>, std::vector<char>> gold_pairs;
    for (const auto& r : s.relations) {
        const auto& h = s.entities.at(r.head);
        const auto& t = s.entities.at(r.tail);
        std::pair<Span, Span> key{{h.begin, h.end}, {t.begin, t.end}};
        if (key.first.overlaps(key.second)) continue;
        auto& target = gold_pairs[key];
        if (target.empty()) target.assign(n_rel, 0);
        target[type_index(model.relation_types, r.type)] = 1;
    }
    for (const auto& [key, target] : gold_pairs)
        out.pairs.push_back({key.first, key.second, target});
    std::vector<std::pair<Span, Span>> neg_pool;
    for (size_t i = 0; i < ents.size(); ++i)
        for (size_t j = 0; j < ents.size(); ++j) {
            if (i == j || ents[i].overlaps(ents[j])) continue;
            std::pair<Span, Span> key{ents[i], ents[j]};
            if (gold_pairs.count(key)) continue;
            if (std::find(neg_pool.begin(), neg_pool.end(), key) !=
                neg_pool.end())
                continue;
            neg_pool.push_back(key);
        }
    auto pair_picks = rng.sample_without_replacement(
        neg_pool.size(),
        std::min<size_t>(neg_pool.size(), size_t(cfg.neg_relation_count)));
    std::sort(pair_picks.begin(), pair_picks.end());
    for (size_t p : pair_picks)
        out.pairs.push_back({neg_pool[p].first, neg_pool[p].second,
                             std::vector<char>(n_rel, 0)});
    return out;
}

SentenceLossParts forward_candidates(const Model& model,
                                     const PreparedSentence& ps,
                                     const Candidates& cands,
                                     const PipelineOptions& opt) {
    PipelineOut po = run_pipeline(model, ps, opt);
    SentenceLossParts out;
    std::map<Span, Tensor> enc_cache;
    auto span_enc = [&](const Span& sp) {
        auto it = enc_cache.find(sp);
        if (it != enc_cache.end()) return it->second;
        Tensor enc = encode_span(sp, po.e_g,
                                 model.span_trigger.width_embeddings.tensor);
        enc_cache.emplace(sp, enc);
        return enc;
    };
    for (const auto& c : cands.spans) {
        out.span_encodings.push_back(span_enc(c.span));
        out.span_labels.push_back(c.label);
    }
    for (const auto& p : cands.pairs) {
        PairFeatures pf =
            build_pair_features(model, po.e_g, p.head, p.tail,
                                span_enc(p.head), span_enc(p.tail), opt.stage2);
        out.pair_encodings.push_back(pf.encoding);
        out.pair_targets.push_back(p.targets);
    }
    return out;
}

Tensor joint_loss(const Model& model, const std::vector<SentenceLossParts>& batch,
                  Rng& dropout_rng, bool train_mode) {
    std::vector<Tensor> all_spans, all_pairs;
    std::vector<size_t> labels;
    std::vector<std::vector<char>> targets;
    for (const auto& parts : batch) {
        all_spans.insert(all_spans.end(), parts.span_encodings.begin(),
                         parts.span_encodings.end());
        labels.insert(labels.end(), parts.span_labels.begin(),
                      parts.span_labels.end());
        all_pairs.insert(all_pairs.end(), parts.pair_encodings.begin(),
                         parts.pair_encodings.end());
        targets.insert(targets.end(), parts.pair_targets.begin(),
                       parts.pair_targets.end());
    }
    if (all_spans.empty()) throw_contract("joint_loss with no span candidates");
    size_t n_cat = model.entity_memory.slot_count();
    Tensor s = dropout(concat_rows(all_spans), model.cfg.dropout, dropout_rng,
                       train_mode);
    Tensor p_ent = softmax_rows(entity_scores(model, s));
    std::vector<double> onehot(labels.size() * n_cat, 0.0);
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_cat) throw_contract("entity label out of range");
        onehot[i * n_cat + labels[i]] = 1.0;
    }
    Tensor y_ent = Tensor::from(labels.size(), n_cat, std::move(onehot));
    Tensor eps_e = Tensor::full(labels.size(), n_cat, kLogEps);
    Tensor ce = scale(sum_all(mul(y_ent, log_elem(add(p_ent, eps_e)))),
                      -1.0 / double(labels.size()));
    if (all_pairs.empty()) return ce;

    size_t n_rel = model.relation_memory.slot_count();
    Tensor r = dropout(concat_rows(all_pairs), model.cfg.dropout, dropout_rng,
                       train_mode);
    Tensor p_rel = sigmoid(relation_scores(model, r));
    std::vector<double> yv(targets.size() * n_rel, 0.0);
    for (size_t i = 0; i < targets.size(); ++i)
        for (size_t j = 0; j < n_rel; ++j) yv[i * n_rel + j] = targets[i][j];
    Tensor y_rel = Tensor::from(targets.size(), n_rel, std::move(yv));
    Tensor ones = Tensor::full(targets.size(), n_rel, 1.0);
    Tensor eps_r = Tensor::full(targets.size(), n_rel, kLogEps);
    Tensor pos = mul(y_rel, log_elem(add(p_rel, eps_r)));
    Tensor neg = mul(sub(ones, y_rel), log_elem(add(sub(ones, p_rel), eps_r)));
    Tensor bce = scale(sum_all(add(pos, neg)),
                       -1.0 / double(targets.size() * n_rel));
    return add(ce, bce);
}

Prediction predict(const Model& model, const PreparedSentence& ps,
                   double threshold, bool stage2) {
    PipelineOptions opt;
    opt.stage2 = stage2;
    opt.train_mode = false;
    PipelineOut po = run_pipeline(model, ps, opt);
    size_t n = ps.sentence->tokens.size();
    Prediction out;
    std::map<Span, Tensor> enc_cache;
    for (const Span& sp :
         enumerate_spans(n, size_t(model.cfg.max_span_size))) {
        Tensor enc = encode_span(sp, po.e_g,
                                 model.span_trigger.width_embeddings.tensor);
        enc_cache.emplace(sp, enc);
        Tensor probs = entity_probs(model, enc);
        size_t best = 0;
        for (size_t c = 1; c < probs.cols(); ++c)
            if (probs.at(0, c) > probs.at(0, best)) best = c;
        if (best != model.none_index())
            out.entities.push_back(
                {sp, model.entity_types[best], probs.at(0, best)});
    }
    for (size_t i = 0; i < out.entities.size(); ++i)
        for (size_t j = 0; j < out.entities.size(); ++j) {
            if (i == j) continue;
            const Span& head = out.entities[i].span;
            const Span& tail = out.entities[j].span;
            if (head.overlaps(tail)) continue;
            PairFeatures pf = build_pair_features(
                model, po.e_g, head, tail, enc_cache.at(head),
                enc_cache.at(tail), stage2);
            Tensor probs = relation_probs(model, pf.encoding);
            for (size_t c = 0; c < probs.cols(); ++c) {
                if (probs.at(0, c) < threshold) continue;
                Prediction::Relation rel{head, tail, model.relation_types[c],
                                         probs.at(0, c), {}};
                if (pf.trigger_weights)
                    rel.trigger_weights = pf.trigger_weights->values();
                out.relations.push_back(std::move(rel));
            }
        }
    return out;
}

SentencePrediction to_sentence_prediction(const Prediction& p) {
    SentencePrediction out;
    std::map<Span, std::string> type_of;
    for (const auto& e : p.entities) {
        out.entities.push_back({e.type, e.span.begin, e.span.end});
        type_of[e.span] = e.type;
    }
    for (const auto& r : p.relations) {
        SentencePrediction::Relation rel;
        rel.type = r.type;
        rel.head = {type_of.at(r.head), r.head.begin, r.head.end};
        rel.tail = {type_of.at(r.tail), r.tail.begin, r.tail.end};
        rel.probability = r.probability;
        out.relations.push_back(std::move(rel));
    }
    return out;
}

}  // namespace trimf
