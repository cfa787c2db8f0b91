// Typed client for the workbench JSON API. Every displayed value in the
// UI comes through here; no corpus computation happens in the browser.

export interface CorpusInfo {
    id: string;
    size: number;
    positional: string[];
    structural: string[];
    dynamic: string[];
    alignedTo: string | null;
}

export interface QueryResponse {
    resultId: string;
    matchCount: number;
}

export interface KwicLine {
    index: number;
    start: number;
    end: number;
    left: string[];
    match: string[];
    right: string[];
    text: string;
}

export interface KwicPage {
    corpus: string;
    query: string | null;
    matchCount: number;
    page: number;
    pageSize: number;
    total: number;
    lines: KwicLine[];
}

export interface AlignedPair {
    source: string;
    target: string;
}

export interface AlignedPage {
    corpus: string;
    target: string;
    page: number;
    pageSize: number;
    total: number;
    pairs: AlignedPair[];
}

export interface HistoryEntry {
    query: string;
    corpus: string;
    timestamp: number;
}

export interface ErrorPosition {
    line: number;
    column: number;
}

export class ApiError extends Error {
    kind: string;
    position: ErrorPosition | null;

    constructor(kind: string, message: string, position: ErrorPosition | null = null) {
        super(message);
        this.kind = kind;
        this.position = position;
    }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
    const response = await fetch(input, init);
    const body = await response.json();
    if (!response.ok) {
        const err = body && body.error ? body.error : {};
        throw new ApiError(
            err.kind ?? 'error',
            err.message ?? `request failed (${response.status})`,
            err.position ?? null,
        );
    }
    return body as T;
}

function jsonInit(method: string, payload: unknown): RequestInit {
    return {
        method,
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(payload),
    };
}

export interface KwicParams {
    context: string;
    sort: string;
    attrs: string;
    page: number;
    pageSize: number;
}

export class ApiClient {
    base: string;

    constructor(base = '') {
        this.base = base;
    }

    listCorpora(): Promise<CorpusInfo[]> {
        return request<CorpusInfo[]>(`${this.base}/corpora`);
    }

    query(corpus: string, query: string, subcorpusResult?: string): Promise<QueryResponse> {
        const payload: Record<string, string> = { corpus, query };
        if (subcorpusResult) payload.subcorpusResult = subcorpusResult;
        return request<QueryResponse>(`${this.base}/query`, jsonInit('POST', payload));
    }

    kwic(resultId: string, params: KwicParams): Promise<KwicPage> {
        const qs = new URLSearchParams({
            context: params.context,
            sort: params.sort,
            attrs: params.attrs,
            page: String(params.page),
            pageSize: String(params.pageSize),
        });
        return request<KwicPage>(`${this.base}/results/${resultId}/kwic?${qs}`);
    }

    setop(kind: string, a: string, b: string): Promise<QueryResponse> {
        return request<QueryResponse>(
            `${this.base}/results/setop`, jsonInit('POST', { kind, a, b }));
    }

    deleteLines(resultId: string, indices: number[]): Promise<QueryResponse> {
        return request<QueryResponse>(
            `${this.base}/results/${resultId}/lines`, jsonInit('DELETE', { indices }));
    }

    aligned(resultId: string, page = 1, pageSize = 50): Promise<AlignedPage> {
        const qs = new URLSearchParams({ page: String(page), pageSize: String(pageSize) });
        return request<AlignedPage>(`${this.base}/results/${resultId}/aligned?${qs}`);
    }

    history(): Promise<HistoryEntry[]> {
        return request<HistoryEntry[]>(`${this.base}/history`);
    }
}
