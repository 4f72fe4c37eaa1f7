//! HTTP service for the annotation interface.
//!
//! | method | path | body / response |
//! |---|---|---|
//! | GET  | `/docs` | `{"docs":[{"doc_id","title","n_sentences"}]}` |
//! | GET  | `/docs/{id}` | corpus record |
//! | GET  | `/docs/{id}/constituents` | `{"doc_id","sentences":[{"sent_index","tokens","constituents":[...]}]}` |
//! | GET  | `/docs/{id}/annotations` | `{"doc_id","annotations":[annotation record]}`, latest per annotator, `?annotator=` filters |
//! | POST | `/docs/{id}/annotations` | annotation record; echoed back once durable |
//! | POST | `/docs/{id}/preview` | `{"triples":[...]}` to graph wire format |
//! | GET  | `/agreement` | corpus agreement report, `?doc_id=` restricts |
//!
//! Errors are `{"error": message, "field": name-or-null}` with status 400 or 404.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use graphel_core::index::DocIndex;
use graphel_core::metrics::CorpusReport;
use graphel_core::records::{latest_sets, read_annotation_log, read_corpus, AnnotationRecord, CorpusRecord};
use graphel_core::render::{build_graph, WireGraph};
use graphel_core::{AbstractDoc, Constituent, Scorer, SummaryTriple};
use serde::{Deserialize, Serialize};
use tokio::sync::oneshot;

use crate::commands::agreement_sets;
use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ApiError {
    pub error: String,
    pub field: Option<String>,
}

struct Failure(StatusCode, ApiError);

impl Failure {
    fn not_found(what: impl Into<String>) -> Self {
        Failure(
            StatusCode::NOT_FOUND,
            ApiError {
                error: what.into(),
                field: None,
            },
        )
    }

    fn bad_request(field: Option<String>, message: impl Into<String>) -> Self {
        Failure(
            StatusCode::BAD_REQUEST,
            ApiError {
                error: message.into(),
                field,
            },
        )
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure(
            StatusCode::INTERNAL_SERVER_ERROR,
            ApiError {
                error: message.into(),
                field: None,
            },
        )
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type Reply<T> = Result<Json<T>, Failure>;

type WriteJob = (AnnotationRecord, oneshot::Sender<io::Result<()>>);

/// Appends annotation records on a dedicated thread. Each record is one
/// `write` of a full line followed by `fsync`, and becomes visible to
/// readers only after that succeeds.
struct AnnotationLog {
    jobs: mpsc::Sender<WriteJob>,
    records: Arc<RwLock<Vec<AnnotationRecord>>>,
}

impl AnnotationLog {
    fn open(path: &Path) -> Result<Self, CliError> {
        let records = read_annotation_log(path)?;
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        repair_tail(&mut file).map_err(|e| CliError::io(path, e))?;
        let records = Arc::new(RwLock::new(records));
        let (jobs, rx) = mpsc::channel::<WriteJob>();
        let shared = Arc::clone(&records);
        std::thread::Builder::new()
            .name("annotation-writer".into())
            .spawn(move || {
                for (record, done) in rx {
                    let result = append(&mut file, &record);
                    if result.is_ok() {
                        shared.write().expect("record list lock").push(record);
                    }
                    let _ = done.send(result);
                }
            })
            .map_err(|e| CliError::io(path, e))?;
        Ok(AnnotationLog { jobs, records })
    }

    async fn append(&self, record: AnnotationRecord) -> io::Result<()> {
        let (tx, rx) = oneshot::channel();
        self.jobs
            .send((record, tx))
            .map_err(|_| io::Error::other("annotation writer stopped"))?;
        rx.await.map_err(|_| io::Error::other("annotation writer stopped"))?
    }

    fn snapshot(&self) -> Vec<AnnotationRecord> {
        self.records.read().expect("record list lock").clone()
    }
}

fn append(file: &mut File, record: &AnnotationRecord) -> io::Result<()> {
    let mut line = serde_json::to_vec(record)?;
    line.push(b'\n');
    file.write_all(&line)?;
    file.sync_data()
}

/// Makes sure the next append starts on a fresh line: a complete record
/// missing its newline gets one, an interrupted partial record is cut off.
fn repair_tail(file: &mut File) -> io::Result<()> {
    let mut text = Vec::new();
    file.seek(SeekFrom::Start(0))?;
    file.read_to_end(&mut text)?;
    if text.is_empty() || text.ends_with(b"\n") {
        return Ok(());
    }
    let cut = text.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if serde_json::from_slice::<AnnotationRecord>(&text[cut..]).is_ok() {
        file.write_all(b"\n")?;
    } else {
        file.set_len(cut as u64)?;
    }
    file.sync_data()
}

struct DocEntry {
    doc: AbstractDoc,
    index: DocIndex,
}

/// Immutable corpus plus the append-only annotation log.
pub struct AppState {
    order: Vec<String>,
    docs: BTreeMap<String, DocEntry>,
    log: AnnotationLog,
    scorer: Scorer,
}

impl AppState {
    pub fn open(corpus: &Path, annotations: &Path, scorer: Scorer) -> Result<Self, CliError> {
        let docs = read_corpus(corpus)?;
        Self::from_docs(docs, annotations, scorer)
    }

    pub fn from_docs(docs: Vec<AbstractDoc>, annotations: &Path, scorer: Scorer) -> Result<Self, CliError> {
        let mut order = Vec::with_capacity(docs.len());
        let mut map = BTreeMap::new();
        for doc in docs {
            let id = doc.doc_id().to_string();
            let index = DocIndex::new(&doc);
            if map.insert(id.clone(), DocEntry { doc, index }).is_some() {
                return Err(CliError::DuplicateDocId(id));
            }
            order.push(id);
        }
        Ok(AppState {
            order,
            docs: map,
            log: AnnotationLog::open(annotations)?,
            scorer,
        })
    }

    fn doc(&self, id: &str) -> Result<&DocEntry, Failure> {
        self.docs
            .get(id)
            .ok_or_else(|| Failure::not_found(format!("unknown doc_id {id:?}")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/docs", get(list_docs))
        .route("/docs/{id}", get(get_doc))
        .route("/docs/{id}/constituents", get(get_constituents))
        .route("/docs/{id}/annotations", get(get_annotations).post(post_annotation))
        .route("/docs/{id}/preview", post(preview))
        .route("/agreement", get(get_agreement))
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::io(Path::new(&addr.to_string()), e))?;
    log::info!("listening on {}", addr);
    axum::serve(listener, router(Arc::new(state)))
        .await
        .map_err(|e| CliError::io(&PathBuf::from(addr.to_string()), e))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DocSummary {
    pub doc_id: String,
    pub title: String,
    pub n_sentences: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DocList {
    pub docs: Vec<DocSummary>,
}

async fn list_docs(State(s): State<Arc<AppState>>) -> Json<DocList> {
    let docs = s
        .order
        .iter()
        .map(|id| {
            let doc = &s.docs[id].doc;
            DocSummary {
                doc_id: id.clone(),
                title: doc.sentences().first().map(|t| t.join(" ")).unwrap_or_default(),
                n_sentences: doc.sentences().len(),
            }
        })
        .collect();
    Json(DocList { docs })
}

async fn get_doc(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Reply<CorpusRecord> {
    Ok(Json(CorpusRecord::from_doc(&s.doc(&id)?.doc)))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstituentView {
    #[serde(flatten)]
    pub constituent: Constituent,
    pub depth: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SentenceView {
    pub sent_index: usize,
    pub tokens: Vec<String>,
    pub constituents: Vec<ConstituentView>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstituentsResponse {
    pub doc_id: String,
    pub sentences: Vec<SentenceView>,
}

async fn get_constituents(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Reply<ConstituentsResponse> {
    let entry = s.doc(&id)?;
    let sentences = entry
        .index
        .sentences
        .iter()
        .enumerate()
        .map(|(i, sent)| {
            let mut depths = vec![0usize; sent.nodes.len()];
            for (n, node) in sent.nodes.iter().enumerate() {
                if let Some(p) = node.parent {
                    depths[n] = depths[p] + 1;
                }
            }
            SentenceView {
                sent_index: i,
                tokens: sent.tokens.clone(),
                constituents: sent
                    .nodes
                    .iter()
                    .zip(depths)
                    .map(|(n, depth)| ConstituentView {
                        constituent: n.constituent.clone(),
                        depth,
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(Json(ConstituentsResponse { doc_id: id, sentences }))
}

#[derive(Debug, Deserialize)]
struct AnnotatorQuery {
    annotator: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnnotationsResponse {
    pub doc_id: String,
    pub annotations: Vec<AnnotationRecord>,
}

async fn get_annotations(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<AnnotatorQuery>,
) -> Reply<AnnotationsResponse> {
    s.doc(&id)?;
    let mut latest: BTreeMap<String, AnnotationRecord> = BTreeMap::new();
    for r in s.log.snapshot() {
        if r.doc_id == id && q.annotator.as_ref().is_none_or(|a| *a == r.annotator_id) {
            latest.insert(r.annotator_id.clone(), r);
        }
    }
    Ok(Json(AnnotationsResponse {
        doc_id: id,
        annotations: latest.into_values().collect(),
    }))
}

/// JSON body decoding that names the offending field.
fn decode<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != ".").then_some(path);
        Failure::bad_request(field, e.into_inner().to_string())
    })
}

async fn post_annotation(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Reply<AnnotationRecord> {
    let entry = s.doc(&id)?;
    let record: AnnotationRecord = decode(&body)?;
    if record.doc_id != id {
        return Err(Failure::bad_request(
            Some("doc_id".into()),
            format!("{:?} does not match the document in the path", record.doc_id),
        ));
    }
    record
        .validate_for(&entry.doc)
        .map_err(|e| Failure::bad_request(Some(e.field), e.message))?;
    s.log
        .append(record.clone())
        .await
        .map_err(|e| Failure::internal(format!("could not persist annotation: {e}")))?;
    Ok(Json(record))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PreviewRequest {
    pub triples: Vec<SummaryTriple>,
}

async fn preview(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Reply<WireGraph> {
    let entry = s.doc(&id)?;
    let req: PreviewRequest = decode(&body)?;
    for (i, t) in req.triples.iter().enumerate() {
        if let Some(span) = t.spans().find(|sp| !entry.doc.span_in_bounds(sp)) {
            return Err(Failure::bad_request(
                Some(format!("triples[{i}]")),
                format!("span {:?} is outside the document", <[usize; 3]>::from(*span)),
            ));
        }
    }
    Ok(Json(WireGraph::from(&build_graph(&req.triples))))
}

#[derive(Debug, Deserialize)]
struct AgreementQuery {
    doc_id: Option<String>,
}

async fn get_agreement(State(s): State<Arc<AppState>>, Query(q): Query<AgreementQuery>) -> Reply<CorpusReport> {
    let mut sets = latest_sets(&s.log.snapshot());
    if let Some(id) = &q.doc_id {
        s.doc(id)?;
        sets.retain(|k, _| k == id);
    }
    match agreement_sets(&sets, &s.scorer) {
        Ok(r) => Ok(Json(r)),
        Err(CliError::NoPairs) => Ok(Json(CorpusReport::default())),
        Err(e) => Err(Failure::internal(e.to_string())),
    }
}
