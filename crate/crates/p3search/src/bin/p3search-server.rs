//! Standalone server role. Links only the server, transport and wire code.

use std::net::TcpListener;
use std::process::ExitCode;
use std::sync::Arc;

use p3search::server::Server;
use p3search::transport::serve;

fn main() -> ExitCode {
    let addr = std::env::args().nth(1).unwrap_or_else(|| "127.0.0.1:7370".to_string());
    let listener = match TcpListener::bind(&addr) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot listen on {addr}: {e}");
            return ExitCode::from(1);
        }
    };
    if let Ok(a) = listener.local_addr() {
        println!("listening on {a}");
    }
    match serve(listener, Arc::new(Server::new())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
