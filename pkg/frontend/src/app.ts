// Single-page concordancer: query input on top, KWIC list in the
// middle, expanded context for the selected line at the bottom and a
// query-history sidebar. All data comes from the JSON API.

import {
    AlignedPage,
    ApiClient,
    ApiError,
    CorpusInfo,
    HistoryEntry,
    KwicPage,
} from './api';

export interface NamedResult {
    id: string;
    corpus: string;
    query: string;
    matchCount: number;
}

export interface UiState {
    corpora: CorpusInfo[];
    corpus: string;
    queryText: string;
    activeResult: string | null;
    context: string;
    sort: string;
    attrs: string;
    page: number;
    pageSize: number;
    selected: Set<number>;
    history: HistoryEntry[];
    results: NamedResult[];
}

const EXPANDED_CONTEXT = 12;

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

export class Concordancer {
    api: ApiClient;
    root: HTMLElement;
    state: UiState;
    /** Monotonic token: responses for superseded queries are dropped. */
    private requestToken = 0;

    // widgets
    corpusSelect!: HTMLSelectElement;
    queryInput!: HTMLInputElement;
    errorBox!: HTMLElement;
    statusBox!: HTMLElement;
    kwicBody!: HTMLElement;
    pageInfo!: HTMLElement;
    sortSelect!: HTMLSelectElement;
    contextInput!: HTMLInputElement;
    detailPane!: HTMLElement;
    historyList!: HTMLElement;
    resultList!: HTMLElement;
    setopA!: HTMLSelectElement;
    setopB!: HTMLSelectElement;
    setopKind!: HTMLSelectElement;
    alignedPane!: HTMLElement;

    constructor(root: HTMLElement, api: ApiClient) {
        this.root = root;
        this.api = api;
        this.state = {
            corpora: [],
            corpus: '',
            queryText: '',
            activeResult: null,
            context: '5',
            sort: 'position',
            attrs: 'word',
            page: 1,
            pageSize: 50,
            selected: new Set(),
            history: [],
            results: [],
        };
        this.buildLayout();
    }

    async start(): Promise<void> {
        this.state.corpora = await this.api.listCorpora();
        this.corpusSelect.replaceChildren(
            ...this.state.corpora.map((c) => {
                const option = el('option', undefined, c.id);
                option.value = c.id;
                return option;
            }),
        );
        if (this.state.corpora.length > 0) {
            this.state.corpus = this.state.corpora[0].id;
            this.corpusSelect.value = this.state.corpus;
        }
        await this.refreshHistory();
    }

    private buildLayout(): void {
        const main = el('div', 'main');
        const sidebar = el('aside', 'sidebar');
        this.root.replaceChildren(main, sidebar);

        // query bar
        const queryBar = el('form', 'query-bar');
        this.corpusSelect = el('select', 'corpus-select');
        this.corpusSelect.addEventListener('change', () => {
            this.state.corpus = this.corpusSelect.value;
        });
        this.queryInput = el('input', 'query-input');
        this.queryInput.type = 'text';
        this.queryInput.placeholder = 'query, e.g. [pos="NN.*"]';
        const submit = el('button', 'submit-button', 'Query');
        submit.type = 'submit';
        queryBar.append(this.corpusSelect, this.queryInput, submit);
        queryBar.addEventListener('submit', (ev) => {
            ev.preventDefault();
            void this.submitQuery(this.queryInput.value);
        });
        this.errorBox = el('pre', 'error-box');
        this.statusBox = el('div', 'status-box');

        // kwic controls + table
        const controls = el('div', 'kwic-controls');
        this.sortSelect = el('select', 'sort-select');
        for (const key of ['position', 'match', 'left-context', 'right-context']) {
            const option = el('option', undefined, key);
            option.value = key;
            this.sortSelect.append(option);
        }
        this.sortSelect.addEventListener('change', () => {
            void this.sortView(this.sortSelect.value);
        });
        this.contextInput = el('input', 'context-input');
        this.contextInput.value = this.state.context;
        this.contextInput.addEventListener('change', () => {
            void this.adjustContext(this.contextInput.value);
        });
        const prev = el('button', 'page-prev', '<');
        prev.addEventListener('click', () => void this.gotoPage(this.state.page - 1));
        const next = el('button', 'page-next', '>');
        next.addEventListener('click', () => void this.gotoPage(this.state.page + 1));
        this.pageInfo = el('span', 'page-info');
        const save = el('button', 'save-button', 'Save lines');
        save.addEventListener('click', () => this.saveLines());
        controls.append(this.sortSelect, this.contextInput, prev, this.pageInfo, next, save);

        this.kwicBody = el('div', 'kwic-list');
        this.kwicBody.tabIndex = 0;
        this.kwicBody.addEventListener('keydown', (ev) => {
            if (ev.key === 'Delete') void this.deleteSelected();
        });
        this.detailPane = el('div', 'detail-pane');
        this.alignedPane = el('div', 'aligned-pane');
        main.append(queryBar, this.errorBox, this.statusBox, controls,
            this.kwicBody, this.detailPane, this.alignedPane);

        // sidebar: history + named results + set operations
        sidebar.append(el('h2', undefined, 'History'));
        this.historyList = el('ul', 'history-list');
        sidebar.append(this.historyList, el('h2', undefined, 'Results'));
        this.resultList = el('ul', 'result-list');
        const setop = el('div', 'setop-bar');
        this.setopA = el('select', 'setop-a');
        this.setopB = el('select', 'setop-b');
        this.setopKind = el('select', 'setop-kind');
        for (const kind of ['union', 'intersection', 'difference']) {
            const option = el('option', undefined, kind);
            option.value = kind;
            this.setopKind.append(option);
        }
        const combine = el('button', 'setop-button', 'Combine');
        combine.addEventListener('click', () => void this.combineResults());
        setop.append(this.setopA, this.setopKind, this.setopB, combine);
        const alignedButton = el('button', 'aligned-button', 'Aligned view');
        alignedButton.addEventListener('click', () => void this.viewAligned());
        sidebar.append(this.resultList, setop, alignedButton);
    }

    // -- queries ----------------------------------------------------------

    async submitQuery(text: string): Promise<void> {
        if (!this.state.corpus) return;
        const token = ++this.requestToken;
        this.state.queryText = text;
        this.queryInput.value = text;
        this.clearError();
        try {
            const response = await this.api.query(this.state.corpus, text);
            if (token !== this.requestToken) return; // superseded
            const named: NamedResult = {
                id: response.resultId,
                corpus: this.state.corpus,
                query: text,
                matchCount: response.matchCount,
            };
            this.state.results.push(named);
            this.renderResultList();
            await this.selectResult(response.resultId);
            await this.refreshHistory();
        } catch (err) {
            if (token !== this.requestToken) return;
            this.showError(err, text);
        }
    }

    async rerunHistory(index: number): Promise<void> {
        const entry = this.state.history[index];
        if (!entry) return;
        this.corpusSelect.value = entry.corpus;
        this.state.corpus = entry.corpus;
        await this.submitQuery(entry.query);
    }

    async selectResult(resultId: string): Promise<void> {
        this.state.activeResult = resultId;
        this.state.page = 1;
        this.state.selected.clear();
        this.alignedPane.replaceChildren();
        this.renderResultList();
        await this.refreshKwic();
    }

    // -- kwic view --------------------------------------------------------

    async refreshKwic(): Promise<void> {
        const resultId = this.state.activeResult;
        if (!resultId) return;
        try {
            const page = await this.api.kwic(resultId, {
                context: this.state.context,
                sort: this.state.sort,
                attrs: this.state.attrs,
                page: this.state.page,
                pageSize: this.state.pageSize,
            });
            this.renderKwic(page);
        } catch (err) {
            this.showError(err);
        }
    }

    private renderKwic(page: KwicPage): void {
        this.statusBox.textContent = `${page.matchCount} matches`;
        const pages = Math.max(1, Math.ceil(page.total / page.pageSize));
        this.pageInfo.textContent = `page ${page.page} / ${pages}`;
        this.kwicBody.replaceChildren(...page.lines.map((line) => {
            const row = el('div', 'kwic-line');
            row.dataset.index = String(line.index);
            if (this.state.selected.has(line.index)) row.classList.add('selected');
            row.append(
                el('span', 'kwic-left', line.left.join(' ')),
                el('span', 'kwic-match', line.match.join(' ')),
                el('span', 'kwic-right', line.right.join(' ')),
            );
            row.addEventListener('click', () => {
                this.toggleSelection(line.index, row);
                void this.showDetail(line.index);
            });
            return row;
        }));
    }

    private toggleSelection(index: number, row: HTMLElement): void {
        if (this.state.selected.has(index)) {
            this.state.selected.delete(index);
            row.classList.remove('selected');
        } else {
            this.state.selected.add(index);
            row.classList.add('selected');
        }
    }

    /** Expanded-context pane: refetch the one line with a wide window. */
    async showDetail(index: number): Promise<void> {
        const resultId = this.state.activeResult;
        if (!resultId) return;
        const page = await this.api.kwic(resultId, {
            context: String(EXPANDED_CONTEXT),
            sort: 'position',
            attrs: this.state.attrs,
            page: index + 1,
            pageSize: 1,
        });
        const line = page.lines[0];
        this.detailPane.textContent = line ? line.text : '';
    }

    async adjustContext(value: string): Promise<void> {
        this.state.context = value;
        this.contextInput.value = value;
        this.state.page = 1;
        await this.refreshKwic();
    }

    async sortView(key: string): Promise<void> {
        this.state.sort = key;
        this.sortSelect.value = key;
        this.state.page = 1;
        await this.refreshKwic();
    }

    async gotoPage(page: number): Promise<void> {
        if (page < 1) return;
        this.state.page = page;
        await this.refreshKwic();
    }

    async deleteSelected(): Promise<void> {
        const resultId = this.state.activeResult;
        if (!resultId || this.state.selected.size === 0) return;
        const indices = [...this.state.selected].sort((a, b) => a - b);
        try {
            const response = await this.api.deleteLines(resultId, indices);
            this.state.selected.clear();
            const named = this.state.results.find((r) => r.id === resultId);
            if (named) named.matchCount = response.matchCount;
            this.renderResultList();
            await this.refreshKwic();
        } catch (err) {
            this.showError(err);
        }
    }

    saveLines(): void {
        const rows = [...this.kwicBody.querySelectorAll('.kwic-line')];
        const wanted = rows.filter((row) =>
            this.state.selected.size === 0
            || this.state.selected.has(Number((row as HTMLElement).dataset.index)));
        const text = wanted.map((row) => {
            const [left, match, right] = [...row.children].map((c) => c.textContent ?? '');
            return [left, `<${match}>`, right].filter((part) => part !== '<>' && part !== '').join(' ');
        }).join('\n');
        const blob = new Blob([text + '\n'], { type: 'text/plain' });
        const link = el('a');
        link.href = URL.createObjectURL(blob);
        link.download = 'kwic.txt';
        link.click();
        URL.revokeObjectURL(link.href);
    }

    // -- combining and aligned display ------------------------------------

    async combineResults(): Promise<void> {
        const a = this.setopA.value;
        const b = this.setopB.value;
        if (!a || !b) return;
        this.clearError();
        try {
            const response = await this.api.setop(this.setopKind.value, a, b);
            const corpusA = this.state.results.find((r) => r.id === a);
            this.state.results.push({
                id: response.resultId,
                corpus: corpusA ? corpusA.corpus : this.state.corpus,
                query: `${this.setopKind.value}(${a}, ${b})`,
                matchCount: response.matchCount,
            });
            this.renderResultList();
            await this.selectResult(response.resultId);
        } catch (err) {
            this.showError(err);
        }
    }

    async viewAligned(): Promise<void> {
        const resultId = this.state.activeResult;
        if (!resultId) return;
        this.clearError();
        try {
            const page = await this.api.aligned(resultId);
            this.renderAligned(page);
        } catch (err) {
            this.showError(err);
        }
    }

    private renderAligned(page: AlignedPage): void {
        this.alignedPane.replaceChildren(...page.pairs.map((pair) => {
            const block = el('div', 'aligned-pair');
            block.append(
                el('div', 'aligned-source', pair.source),
                el('div', 'aligned-target', pair.target),
            );
            return block;
        }));
    }

    // -- history and results sidebar --------------------------------------

    async refreshHistory(): Promise<void> {
        this.state.history = await this.api.history();
        this.historyList.replaceChildren(...this.state.history.map((entry, i) => {
            const item = el('li', 'history-entry', `${entry.corpus}: ${entry.query}`);
            item.addEventListener('click', () => void this.rerunHistory(i));
            return item;
        }));
    }

    private renderResultList(): void {
        this.resultList.replaceChildren(...this.state.results.map((named) => {
            const item = el('li', 'result-entry',
                `${named.id} (${named.matchCount}) ${named.query}`);
            if (named.id === this.state.activeResult) item.classList.add('active');
            item.addEventListener('click', () => void this.selectResult(named.id));
            return item;
        }));
        for (const select of [this.setopA, this.setopB]) {
            const current = select.value;
            select.replaceChildren(...this.state.results.map((named) => {
                const option = el('option', undefined, named.id);
                option.value = named.id;
                return option;
            }));
            if (this.state.results.some((r) => r.id === current)) select.value = current;
        }
    }

    // -- errors -----------------------------------------------------------

    private clearError(): void {
        this.errorBox.textContent = '';
        this.errorBox.className = 'error-box';
    }

    showError(err: unknown, queryText?: string): void {
        if (err instanceof ApiError) {
            this.errorBox.className = `error-box error-${err.kind}`;
            if (err.kind === 'syntax' && err.position && queryText !== undefined) {
                const caret = ' '.repeat(Math.max(0, err.position.column - 1)) + '^';
                this.errorBox.textContent = `${queryText}\n${caret}\n${err.message}`;
            } else {
                this.errorBox.textContent = err.message;
            }
        } else {
            this.errorBox.className = 'error-box error-unknown';
            this.errorBox.textContent = String(err);
        }
    }
}
