import json
import random
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import httpx
import pytest

from modgate.corpus import Corpus, LabeledComment
from modgate.errors import CacheError, ProviderError, ReplayMiss, RequestTimeout
from modgate.modelgw import (
    Gateway,
    LiveHttpProvider,
    ModelConfig,
    ResponseCache,
    ScriptedProvider,
    load_model_config,
    record_replay,
)
from modgate.taxonomy import Category

OK = "label: Neutral; confidence: 0.99; reason: fine"


def _corpus(n=20, dup_text=False):
    return Corpus(tuple(
        LabeledComment(f"c{i}", "same text" if dup_text else f"comment {i}", Category.NEUTRAL)
        for i in range(n)
    ))


class _Stub:
    """Chat-completion endpoint answering from a queue of (status, delay)."""

    def __init__(self, plan):
        self.plan = list(plan)
        self.hits = 0
        self.bodies = []
        self.headers = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = self.rfile.read(int(self.headers["Content-Length"]))
                stub.bodies.append(json.loads(body))
                stub.headers.append(dict(self.headers))
                status, delay = stub.plan[min(stub.hits, len(stub.plan) - 1)]
                stub.hits += 1
                if delay:
                    time.sleep(delay)
                payload = {"choices": [{"message": {"role": "assistant", "content": OK}}]} if status == 200 else {"error": "x"}
                data = json.dumps(payload).encode()
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}/v1/chat/completions"
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


def _live(url, **kw):
    kw.setdefault("max_retries", 3)
    return ModelConfig(provider="live-http", endpoint=url, **kw)


def test_config_defaults():
    c = ModelConfig(provider="scripted")
    assert (c.model_id, c.temperature, c.top_p, c.max_tokens) == ("gpt-4o", 0.1, 0.9, 150)


@pytest.mark.parametrize(
    "kw", [{"provider": "bogus"}, {"provider": "live-http"}, {"top_p": 0}, {"concurrency_limit": 0}, {"max_tokens": 0}]
)
def test_config_validation(kw):
    kw.setdefault("provider", "scripted")
    with pytest.raises(ValueError):
        ModelConfig(**kw)


def test_load_model_config(tmp_path):
    p = tmp_path / "m.yaml"
    p.write_text("provider: scripted\nmodel_id: m1\ntemperature: 0\nscript: s.json\n", encoding="utf-8")
    cfg, extra = load_model_config(p)
    assert cfg.model_id == "m1" and cfg.temperature == 0.0
    assert extra == {"script": "s.json"}


def test_retry_then_success(specs):
    sleeps = []
    with _Stub([(429, 0), (429, 0), (200, 0)]) as stub:
        gw = Gateway(_live(stub.url), ResponseCache(), LiveHttpProvider("k"), sleep=sleeps.append)
        resp = gw.classify_one(specs["P19"], _corpus(1)[0])
    assert resp.attempt == 3
    assert resp.content == OK
    assert not resp.from_cache
    assert stub.hits == 3
    assert len(sleeps) == 2 and 0.25 <= sleeps[0] <= 0.5 and 0.5 <= sleeps[1] <= 1.0
    body = stub.bodies[0]
    assert (body["model"], body["temperature"], body["top_p"], body["max_tokens"]) == ("gpt-4o", 0.1, 0.9, 150)
    assert [m["role"] for m in body["messages"]] == ["system", "user"]
    assert stub.headers[0]["Authorization"] == "Bearer k"


def test_no_retry_on_auth_error(specs):
    with _Stub([(401, 0)]) as stub:
        gw = Gateway(_live(stub.url), ResponseCache(), LiveHttpProvider("k"), sleep=lambda s: None)
        with pytest.raises(ProviderError) as exc:
            gw.classify_one(specs["P19"], _corpus(1)[0])
    assert exc.value.status == 401
    assert stub.hits == 1


def test_retries_exhausted(specs):
    with _Stub([(503, 0)]) as stub:
        gw = Gateway(_live(stub.url, max_retries=2), ResponseCache(), LiveHttpProvider("k"), sleep=lambda s: None)
        with pytest.raises(ProviderError) as exc:
            gw.classify_one(specs["P19"], _corpus(1)[0])
    assert exc.value.status == 503
    assert stub.hits == 3


def test_timeout(specs):
    with _Stub([(200, 0.5)]) as stub:
        cfg = _live(stub.url, max_retries=1, request_timeout=0.1)
        gw = Gateway(cfg, ResponseCache(), LiveHttpProvider("k"), sleep=lambda s: None)
        with pytest.raises(RequestTimeout):
            gw.classify_one(specs["P19"], _corpus(1)[0])
    assert stub.hits == 2


def test_bad_response_shape(specs):
    def handler(request):
        return httpx.Response(200, json={"unexpected": True})

    client = httpx.Client(transport=httpx.MockTransport(handler))
    gw = Gateway(_live("http://x/v1"), ResponseCache(), LiveHttpProvider("k", client))
    with pytest.raises(ProviderError, match="shape"):
        gw.classify_one(specs["P19"], _corpus(1)[0])


def test_cache_hit_skips_provider(specs, tmp_path):
    cfg = ModelConfig(provider="scripted")
    prov = ScriptedProvider(lambda r: OK)
    cache = ResponseCache(tmp_path / "cache.jsonl")
    gw = Gateway(cfg, cache, prov)
    first = gw.classify_batch(specs["P19"], _corpus(5))
    assert prov.calls == 5
    again = Gateway(cfg, ResponseCache(tmp_path / "cache.jsonl"), prov).classify_batch(specs["P19"], _corpus(5))
    assert prov.calls == 5
    assert all(it.response.from_cache for it in again)
    assert [it.response.content for it in first] == [it.response.content for it in again]


def test_same_digest_dispatched_once(specs):
    prov = ScriptedProvider(lambda r: (time.sleep(0.01), OK)[1])
    gw = Gateway(ModelConfig(provider="scripted", concurrency_limit=8), ResponseCache(), prov)
    items = gw.classify_batch(specs["P19"], _corpus(16, dup_text=True))
    assert prov.calls == 1
    assert all(it.ok for it in items)


def test_order_independent_of_concurrency(specs):
    def answer(request):
        time.sleep(random.random() * 0.005)
        return f"label: Damning; confidence: 0.5; reason: {request.comment_id}"

    out = {}
    for n in (1, 8):
        gw = Gateway(ModelConfig(provider="scripted", concurrency_limit=n), ResponseCache(), ScriptedProvider(answer))
        out[n] = [(it.comment.id, it.response.content) for it in gw.classify_batch(specs["P19"], _corpus(40))]
    assert out[1] == out[8]
    assert [cid for cid, _ in out[1]] == [f"c{i}" for i in range(40)]


def test_batch_collects_failures(specs):
    prov = ScriptedProvider({"c0": OK})
    items = Gateway(ModelConfig(provider="scripted"), ResponseCache(), prov).classify_batch(specs["P19"], _corpus(2))
    assert items[0].ok and not items[1].ok
    assert isinstance(items[1].error, ProviderError)


def test_record_then_replay(specs, tmp_path):
    path = tmp_path / "rec.jsonl"
    live = ModelConfig(provider="scripted", model_id="gpt-4o")
    Gateway(live, ResponseCache(path), ScriptedProvider(lambda r: OK)).classify_batch(specs["P19"], _corpus(3))
    replay = ModelConfig(provider="replay", model_id="gpt-4o")
    items = Gateway(replay, record_replay(path)).classify_batch(specs["P19"], _corpus(3))
    assert all(it.ok and it.response.from_cache and it.response.attempt == 0 for it in items)


def test_replay_miss(specs, tmp_path):
    path = tmp_path / "rec.jsonl"
    path.write_text("", encoding="utf-8")
    gw = Gateway(ModelConfig(provider="replay"), record_replay(path))
    with pytest.raises(ReplayMiss) as exc:
        gw.classify_one(specs["P19"], _corpus(1)[0])
    assert exc.value.comment_id == "c0"


def test_replay_cache_read_only(tmp_path):
    path = tmp_path / "rec.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(CacheError):
        record_replay(path).put("d", "m", "c")


def test_corrupt_cache(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json\n", encoding="utf-8")
    with pytest.raises(CacheError):
        ResponseCache(path)


def test_digest_depends_on_model(specs):
    a = ModelConfig(provider="replay", model_id="gpt-4o")
    b = ModelConfig(provider="replay", model_id="gpt-4")
    text = "x"
    from modgate.promptkit import render_prompt

    r = render_prompt(specs["P19"], text)
    assert a.request_digest(r) != b.request_digest(r)
