//! Request/response plumbing shared by all roles: services answer frames,
//! endpoints send them over TCP or in-process, and a recording endpoint
//! keeps a transcript.

use std::io::{BufReader, BufWriter};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::{Arc, Mutex};
use std::thread;

use crate::error::Result;
use crate::wire::{read_frame, write_frame, Frame, FrameError, Kind};

/// Something that answers one request frame with one reply frame.
pub trait Service: Send + Sync {
    fn handle(&self, request: &Frame) -> Frame;
}

impl<S: Service + ?Sized> Service for Arc<S> {
    fn handle(&self, request: &Frame) -> Frame {
        (**self).handle(request)
    }
}

/// Client side of one request/response exchange.
pub trait Endpoint: Send + Sync {
    fn call(&self, request: &Frame) -> Result<Frame>;
}

/// Answers connections on `listener` with `service`, one thread per
/// connection. Returns only if accepting fails.
pub fn serve<S: Service + 'static>(listener: TcpListener, service: Arc<S>) -> Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let service = Arc::clone(&service);
        thread::spawn(move || {
            let _ = serve_connection(stream, &*service);
        });
    }
    Ok(())
}

/// Serves one connection until it closes or framing is lost. Invalid
/// frames that were consumed whole get an ERROR reply and the connection
/// stays open.
pub fn serve_connection<S: Service + ?Sized>(stream: TcpStream, service: &S) -> Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        match read_frame(&mut reader) {
            Ok(None) => return Ok(()),
            Ok(Some(req)) => write_frame(&mut writer, &service.handle(&req))?,
            Err(e @ FrameError::Rejected(..)) => write_frame(&mut writer, &e.reply())?,
            Err(FrameError::Io(e)) => return Err(e.into()),
            Err(e) => {
                let _ = write_frame(&mut writer, &e.reply());
                return Err(e.into());
            }
        }
    }
}

/// Persistent TCP connection; calls are serialized.
pub struct TcpEndpoint {
    conn: Mutex<(BufReader<TcpStream>, BufWriter<TcpStream>)>,
}

impl TcpEndpoint {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(TcpEndpoint { conn: Mutex::new((reader, BufWriter::new(stream))) })
    }
}

impl Endpoint for TcpEndpoint {
    fn call(&self, request: &Frame) -> Result<Frame> {
        let mut conn = self.conn.lock().expect("connection lock");
        let (reader, writer) = &mut *conn;
        write_frame(writer, request)?;
        match read_frame(reader)? {
            Some(f) => Ok(f),
            None => Err(std::io::Error::from(std::io::ErrorKind::UnexpectedEof).into()),
        }
    }
}

/// Calls a service in the same process, still going through the byte
/// encoding in both directions.
pub struct LocalEndpoint<S> {
    service: Arc<S>,
}

impl<S> LocalEndpoint<S> {
    pub fn new(service: Arc<S>) -> Self {
        LocalEndpoint { service }
    }
}

impl<S: Service> Endpoint for LocalEndpoint<S> {
    fn call(&self, request: &Frame) -> Result<Frame> {
        let req = Frame::decode(&request.encode())?;
        let reply = self.service.handle(&req);
        Ok(Frame::decode(&reply.encode())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Request,
    Reply,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub peer: &'static str,
    pub direction: Direction,
    pub kind: Kind,
    pub bytes: usize,
}

pub type Transcript = Arc<Mutex<Vec<TranscriptEntry>>>;

/// Wraps an endpoint and appends every frame it carries to a transcript.
pub struct Recording<E> {
    inner: E,
    peer: &'static str,
    log: Transcript,
}

impl<E> Recording<E> {
    pub fn new(inner: E, peer: &'static str, log: Transcript) -> Self {
        Recording { inner, peer, log }
    }
}

impl<E: Endpoint> Endpoint for Recording<E> {
    fn call(&self, request: &Frame) -> Result<Frame> {
        let entry = |direction, f: &Frame| TranscriptEntry {
            peer: self.peer,
            direction,
            kind: f.kind,
            bytes: f.encode().len(),
        };
        self.log.lock().expect("transcript lock").push(entry(Direction::Request, request));
        let reply = self.inner.call(request)?;
        self.log.lock().expect("transcript lock").push(entry(Direction::Reply, &reply));
        Ok(reply)
    }
}
